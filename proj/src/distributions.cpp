#include "ldp/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <type_traits>

#include "ldp/error.hpp"
#include "ldp/json_io.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InputParse,
                "bad number '" + std::string(s) + "' in " + context);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Integral of w over [0, upper] by composite Simpson.
template <typename F>
double simpson(F&& w, double upper, int intervals) {
  const double h = upper / intervals;
  double s = w(0.0) + w(upper);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4 : 2) * w(i * h);
  return s * h / 3;
}

// Mean of the density proportional to w on (0, upper); w is negligible past
// upper. Simpson with 2^16 panels is far below 1e-10 for these integrands.
template <typename F>
double tail_mean(F&& w, double upper) {
  constexpr int kPanels = 1 << 16;
  const double mass = simpson(w, upper, kPanels);
  const double first = simpson([&](double x) { return x * w(x); }, upper, kPanels);
  return first / mass;
}

double model_mean(const ModelVariant& v) {
  return std::visit(
      overloaded{
          [](const PointMass& m) { return m.a; },
          [](const Discrete& m) { return m.measure.mean(); },
          [](const Normal& m) { return m.mean; },
          [](const Exponential& m) { return 1 / m.rate; },
          [](const TwoSidedExp& m) {
            return 0.5 * (1 / m.right_rate - 1 / m.left_rate);
          },
          [](const Uniform& m) { return 0.5 * (m.a + m.b); },
          [](const DoubleExpTail& m) {
            // exp(lambda x) > 745 makes the density underflow
            return tail_mean(
                [&](double x) { return std::exp(-std::exp(m.lambda * x)); },
                std::log(745.0) / m.lambda);
          },
          [](const SuperExpTail& m) {
            return tail_mean(
                [&](double x) { return std::exp(-std::exp(std::pow(x, m.lambda))); },
                std::pow(std::log(745.0), 1 / m.lambda));
          },
      },
      v);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidModel, what);
}

void validate(const ModelVariant& v) {
  std::visit(
      overloaded{
          [](const PointMass& m) { require(std::isfinite(m.a), "pointmass: a must be finite"); },
          [](const Discrete&) {},
          [](const Normal& m) {
            require(std::isfinite(m.mean) && m.variance > 0 && std::isfinite(m.variance),
                    "normal: need finite mean and variance > 0");
          },
          [](const Exponential& m) {
            require(m.rate > 0 && std::isfinite(m.rate), "exponential: rate > 0");
          },
          [](const TwoSidedExp& m) {
            require(m.left_rate > 0 && m.right_rate > 0 && std::isfinite(m.left_rate) &&
                        std::isfinite(m.right_rate),
                    "twosidedexp: rates > 0");
          },
          [](const Uniform& m) {
            require(std::isfinite(m.a) && std::isfinite(m.b) && m.a < m.b,
                    "uniform: need a < b");
          },
          [](const DoubleExpTail& m) {
            require(m.lambda > 0 && std::isfinite(m.lambda), "doubleexptail: lambda > 0");
          },
          [](const SuperExpTail& m) {
            require(m.lambda > 1 && std::isfinite(m.lambda), "superexptail: lambda > 1");
          },
      },
      v);
}

// Uniform on (0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng) {
  return (double(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller, cosine branch only: one normal per two uniforms.
double std_normal(std::mt19937_64& rng) {
  const double u1 = uniform01(rng), u2 = uniform01(rng);
  return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

// Root of an increasing function on (lo, hi) by bisection.
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double target) {
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// log(expm1(t) / t) without overflow.
double log_expm1_over(double t) {
  if (t == 0) return 0;
  if (t > 30) return t + std::log(-std::expm1(-t)) - std::log(t);
  return std::log(std::expm1(t) / t);
}

// d/dt log(expm1(t)/t) = 1/(1 - e^{-t}) - 1/t
double dlog_expm1_over(double t) {
  if (std::abs(t) < 1e-4) return 0.5 + t / 12;
  if (t > 0) return 1 / (-std::expm1(-t)) - 1 / t;
  return 1 + 1 / std::expm1(t) - 1 / t;
}

[[noreturn]] void unsupported(const DistributionModel& model, const char* what) {
  throw Error(ErrorCode::UnsupportedClosedForm,
              std::string(what) + " has no closed form for " + model.to_string());
}

}  // namespace

DistributionModel::DistributionModel(ModelVariant model) : model_(std::move(model)) {
  validate(model_);
  mean_ = model_mean(model_);
}

std::string DistributionModel::to_string() const {
  return std::visit(
      overloaded{
          [](const PointMass& m) { return "pointmass:" + fmt(m.a); },
          [](const Discrete& m) {
            std::string s = "discrete:";
            for (std::size_t i = 0; i < m.measure.size(); ++i) {
              if (i) s += ',';
              s += fmt(m.measure.atoms()[i]) + ':' + fmt(m.measure.weights()[i]);
            }
            return s;
          },
          [](const Normal& m) { return "normal:" + fmt(m.mean) + ',' + fmt(m.variance); },
          [](const Exponential& m) { return "exponential:" + fmt(m.rate); },
          [](const TwoSidedExp& m) {
            return "twosidedexp:" + fmt(m.left_rate) + ',' + fmt(m.right_rate);
          },
          [](const Uniform& m) { return "uniform:" + fmt(m.a) + ',' + fmt(m.b); },
          [](const DoubleExpTail& m) { return "doubleexptail:" + fmt(m.lambda); },
          [](const SuperExpTail& m) { return "superexptail:" + fmt(m.lambda); },
      },
      model_);
}

DistributionModel parse_model(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InputParse, "model spec needs name:params, got '" + spec + "'");
  }
  std::string name = spec.substr(0, colon);
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  const std::string params = spec.substr(colon + 1);

  if (name == "discrete") {
    if (!params.empty() && params.front() == '@') {
      return Discrete{measure_from_json(read_json_file(params.substr(1)))};
    }
    std::vector<double> atoms, weights;
    for (auto pair : split(params, ',')) {
      const auto ab = split(pair, ':');
      if (ab.size() != 2) {
        throw Error(ErrorCode::InputParse, "discrete atoms are written atom:weight");
      }
      atoms.push_back(parse_double(ab[0], spec));
      weights.push_back(parse_double(ab[1], spec));
    }
    return Discrete{DiscreteMeasure(std::move(atoms), std::move(weights))};
  }

  std::vector<double> p;
  for (auto part : split(params, ',')) p.push_back(parse_double(part, spec));
  auto arity = [&](std::size_t k) {
    if (p.size() != k) {
      throw Error(ErrorCode::InputParse,
                  name + " takes " + std::to_string(k) + " parameter(s)");
    }
  };
  if (name == "pointmass") { arity(1); return PointMass{p[0]}; }
  if (name == "normal") { arity(2); return Normal{p[0], p[1]}; }
  if (name == "exponential") { arity(1); return Exponential{p[0]}; }
  if (name == "twosidedexp") { arity(2); return TwoSidedExp{p[0], p[1]}; }
  if (name == "uniform") { arity(2); return Uniform{p[0], p[1]}; }
  if (name == "doubleexptail") { arity(1); return DoubleExpTail{p[0]}; }
  if (name == "superexptail") { arity(1); return SuperExpTail{p[0]}; }
  throw Error(ErrorCode::InputParse, "unknown model '" + name + "'");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Generators, all driven by std::mt19937_64 seeded with `seed`:
///   Normal         Box-Muller (cosine branch)
///   Exponential    inverse CDF, -log(U) / rate
///   TwoSidedExp    inverse CDF of the two-sided exponential
///   Uniform        a + (b - a) U
///   Discrete       inverse CDF on cumulative weights
///   DoubleExpTail  rejection from Exp(lambda), accept w.p. exp(1 + lambda x - e^{lambda x})
///   SuperExpTail   rejection from Exp(1), accept w.p. exp(1 - c + x - e^{x^lambda}),
///                  c = max_x (x - x^lambda)
SampleBatch<double> sample(const DistributionModel& model, std::size_t n,
                           std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  Vector<double> out(static_cast<Index>(n));
  auto fill = [&](auto&& draw) {
    for (Index i = 0; i < out.size(); ++i) out(i) = draw();
  };
  std::visit(
      overloaded{
          [&](const PointMass& m) { out.setConstant(m.a); },
          [&](const Discrete& m) {
            const auto& w = m.measure.weights();
            std::vector<double> cum(w.size());
            std::partial_sum(w.begin(), w.end(), cum.begin());
            fill([&] {
              const double u = uniform01(rng);
              const auto it = std::upper_bound(cum.begin(), cum.end(), u);
              const std::size_t i =
                  std::min(std::size_t(it - cum.begin()), cum.size() - 1);
              return m.measure.atoms()[i];
            });
          },
          [&](const Normal& m) {
            const double sd = std::sqrt(m.variance);
            fill([&] { return m.mean + sd * std_normal(rng); });
          },
          [&](const Exponential& m) {
            fill([&] { return -std::log(uniform01(rng)) / m.rate; });
          },
          [&](const TwoSidedExp& m) {
            fill([&] {
              const double u = uniform01(rng);
              if (u < 0.5) return std::log(2 * u) / m.left_rate;
              return -std::log(2 * (1 - u)) / m.right_rate;
            });
          },
          [&](const Uniform& m) {
            fill([&] { return m.a + (m.b - m.a) * uniform01(rng); });
          },
          [&](const DoubleExpTail& m) {
            fill([&] {
              for (;;) {
                const double x = -std::log(uniform01(rng)) / m.lambda;
                const double accept = std::exp(1 + m.lambda * x - std::exp(m.lambda * x));
                if (uniform01(rng) < accept) return x;
              }
            });
          },
          [&](const SuperExpTail& m) {
            const double x0 = std::pow(m.lambda, -1 / (m.lambda - 1));
            const double c = x0 - std::pow(x0, m.lambda);
            fill([&] {
              for (;;) {
                const double x = -std::log(uniform01(rng));
                const double accept =
                    std::exp(1 - c + x - std::exp(std::pow(x, m.lambda)));
                if (uniform01(rng) < accept) return x;
              }
            });
          },
      },
      model.variant());
  return SampleBatch<double>(std::move(out));
}

double cgf(const DistributionModel& model, double theta) {
  if (theta == 0) {
    if (!has_closed_form_cgf(model)) unsupported(model, "cgf");
    return 0;
  }
  return std::visit(
      overloaded{
          [&](const PointMass& m) { return theta * m.a; },
          [&](const Discrete& m) { return m.measure.cgf(theta); },
          [&](const Normal& m) {
            return m.mean * theta + 0.5 * m.variance * theta * theta;
          },
          [&](const Exponential& m) {
            if (theta >= m.rate) return kInf;
            return -std::log1p(-theta / m.rate);
          },
          [&](const TwoSidedExp& m) {
            if (theta <= -m.left_rate || theta >= m.right_rate) return kInf;
            return std::log(0.5 * m.left_rate / (m.left_rate + theta) +
                            0.5 * m.right_rate / (m.right_rate - theta));
          },
          [&](const Uniform& m) {
            return theta * m.a + log_expm1_over(theta * (m.b - m.a));
          },
          [&](const DoubleExpTail&) -> double { unsupported(model, "cgf"); },
          [&](const SuperExpTail&) -> double { unsupported(model, "cgf"); },
      },
      model.variant());
}

double mgf(const DistributionModel& model, double theta) {
  if (std::holds_alternative<TwoSidedExp>(model.variant())) {
    const auto& m = std::get<TwoSidedExp>(model.variant());
    if (theta <= -m.left_rate || theta >= m.right_rate) return kInf;
    return 0.5 * m.left_rate / (m.left_rate + theta) +
           0.5 * m.right_rate / (m.right_rate - theta);
  }
  if (std::holds_alternative<Exponential>(model.variant())) {
    const auto& m = std::get<Exponential>(model.variant());
    if (theta >= m.rate) return kInf;
    return m.rate / (m.rate - theta);
  }
  if (!has_closed_form_cgf(model)) unsupported(model, "mgf");
  return std::exp(cgf(model, theta));
}

namespace {

// sup_theta (theta x - Lambda(theta)) for smooth Lambda with Lambda' increasing
// on (lo, hi); the maximizer solves Lambda'(theta) = x.
template <typename D>
double smooth_rate(const DistributionModel& model, double x, double lo,
                   double hi, D&& dcgf) {
  if (!std::isfinite(lo)) {
    lo = -1;
    while (dcgf(lo) > x) lo *= 2;
  }
  if (!std::isfinite(hi)) {
    hi = 1;
    while (dcgf(hi) < x) hi *= 2;
  }
  const double t = bisect_increasing(dcgf, lo, hi, x);
  return std::max(0.0, t * x - cgf(model, t));
}

}  // namespace

double rate(const DistributionModel& model, double x) {
  return std::visit(
      overloaded{
          [&](const PointMass& m) { return x == m.a ? 0.0 : kInf; },
          [&](const Discrete& m) {
            const auto& b = m.measure.atoms();
            if (x < b.front() || x > b.back()) return kInf;
            const auto sol = tilt_linear(m.measure, b, x);
            return sol ? sol->entropy : kInf;
          },
          [&](const Normal& m) {
            const double d = x - m.mean;
            return d * d / (2 * m.variance);
          },
          [&](const Exponential& m) {
            if (x <= 0) return kInf;
            const double u = m.rate * x;
            return u - 1 - std::log(u);
          },
          [&](const TwoSidedExp& m) {
            const double l1 = m.left_rate, l2 = m.right_rate;
            auto dcgf = [&](double t) {
              const double mg = 0.5 * l1 / (l1 + t) + 0.5 * l2 / (l2 - t);
              const double dm = -0.5 * l1 / ((l1 + t) * (l1 + t)) +
                                0.5 * l2 / ((l2 - t) * (l2 - t));
              return dm / mg;
            };
            return smooth_rate(model, x, -l1, l2, dcgf);
          },
          [&](const Uniform& m) {
            if (x <= m.a || x >= m.b) return kInf;
            auto dcgf = [&](double t) {
              return m.a + (m.b - m.a) * dlog_expm1_over(t * (m.b - m.a));
            };
            return smooth_rate(model, x, -kInf, kInf, dcgf);
          },
          [&](const DoubleExpTail&) -> double { unsupported(model, "rate"); },
          [&](const SuperExpTail&) -> double { unsupported(model, "rate"); },
      },
      model.variant());
}

bool has_closed_form_cgf(const DistributionModel& model) noexcept {
  return !std::holds_alternative<DoubleExpTail>(model.variant()) &&
         !std::holds_alternative<SuperExpTail>(model.variant());
}

MgfDomain mgf_domain(const DistributionModel& model) {
  return std::visit(
      overloaded{
          [](const Exponential& m) { return MgfDomain{-kInf, m.rate, false, false}; },
          [](const TwoSidedExp& m) {
            return MgfDomain{-m.left_rate, m.right_rate, false, false};
          },
          [](const auto&) { return MgfDomain{-kInf, kInf, false, false}; },
      },
      model.variant());
}

AlphaBeta alpha0_beta0(const DistributionModel& model) {
  return std::visit(
      overloaded{
          [](const PointMass&) { return AlphaBeta{-kInf, kInf}; },
          [](const Discrete&) { return AlphaBeta{-kInf, kInf}; },
          [](const Uniform&) { return AlphaBeta{-kInf, kInf}; },
          [](const Normal&) { return AlphaBeta{0, 0}; },
          [](const DoubleExpTail& m) { return AlphaBeta{-kInf, m.lambda}; },
          [](const SuperExpTail&) { return AlphaBeta{-kInf, kInf}; },
          // right tail heavier than a Normal's
          [](const Exponential&) { return AlphaBeta{-kInf, 0}; },
          // both tails heavier than a Normal's
          [](const TwoSidedExp&) { return AlphaBeta{0, 0}; },
      },
      model.variant());
}

}  // namespace ldp
