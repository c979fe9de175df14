#include "ldp/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ldp/error.hpp"
#include "ldp/loynes.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  // Neumaier-compensated sum of the shifted exponentials.
  double sum = 0, comp = 0;
  for (double x : xs) {
    const double term = std::exp(x - m);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return m + std::log(sum + comp);
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms,
                                 std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidMeasure,
                "measure needs equally many atoms and weights (>= 1)");
  }
  double total = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!std::isfinite(atoms_[i])) {
      throw Error(ErrorCode::InvalidMeasure, "atoms must be finite");
    }
    if (i > 0 && !(atoms_[i] > atoms_[i - 1])) {
      throw Error(ErrorCode::InvalidMeasure,
                  "atoms must be strictly increasing");
    }
    if (!(weights_[i] > 0) || !std::isfinite(weights_[i])) {
      throw Error(ErrorCode::InvalidMeasure, "weights must be positive");
    }
    total += weights_[i];
  }
  if (std::abs(total - 1) > 1e-12) {
    throw Error(ErrorCode::InvalidMeasure,
                "weights sum to " + std::to_string(total) + ", not 1");
  }
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<double> atoms,
                                            std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0)) {
    throw Error(ErrorCode::InvalidMeasure, "weights must be positive");
  }
  for (double& w : weights) w /= total;
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

double DiscreteMeasure::mean() const noexcept {
  double m = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) m += weights_[i] * atoms_[i];
  return m;
}

double DiscreteMeasure::cgf(double theta) const noexcept {
  if (theta == 0) return 0;
  std::vector<double> terms(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    terms[i] = std::log(weights_[i]) + theta * atoms_[i];
  }
  return log_sum_exp(terms);
}

double rel_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
  double h = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const auto& atoms = mu.atoms();
    auto it = std::lower_bound(atoms.begin(), atoms.end(), nu.atoms()[i]);
    if (it == atoms.end() || *it != nu.atoms()[i]) return kInf;
    const double p = nu.weights()[i];
    const double q = mu.weights()[std::size_t(it - atoms.begin())];
    if (p != q) h += p * std::log(p / q);
  }
  return std::max(0.0, h);
}

std::optional<TiltSolution> tilt_linear(const DiscreteMeasure& mu,
                                        const std::vector<double>& g,
                                        double target, double tilt_tol) {
  if (g.size() != mu.size()) {
    throw Error(ErrorCode::ShapeMismatch, "constraint size != atom count");
  }
  if (!(tilt_tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tilt_tol must be positive");
  }
  const auto [gmin_it, gmax_it] = std::minmax_element(g.begin(), g.end());
  const double gmin = *gmin_it, gmax = *gmax_it;
  if (target < gmin || target > gmax || !std::isfinite(target)) {
    return std::nullopt;
  }

  auto residual_of = [&](const DiscreteMeasure& nu) {
    double s = 0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const auto& atoms = mu.atoms();
      const auto j = std::size_t(
          std::lower_bound(atoms.begin(), atoms.end(), nu.atoms()[i]) -
          atoms.begin());
      s += nu.weights()[i] * g[j];
    }
    return s - target;
  };

  if (gmin == gmax) {
    return TiltSolution{mu, 0.0, 0.0, 0.0};
  }
  if (target == gmin || target == gmax) {
    // Limit lambda -> -inf or +inf: mu conditioned on the extremal atoms.
    std::vector<double> atoms, weights;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (g[i] == target) {
        atoms.push_back(mu.atoms()[i]);
        weights.push_back(mu.weights()[i]);
      }
    }
    DiscreteMeasure nu = DiscreteMeasure::normalized(atoms, weights);
    const double h = rel_entropy(nu, mu);
    const double r = residual_of(nu);
    return TiltSolution{std::move(nu), target == gmin ? -kInf : kInf, h, r};
  }

  // Work with d_i = (g_i - target) / scale so that the root equation is
  // sum nu_i(lambda') d_i = 0 with |d_i| <= 1.
  double scale = 0;
  for (double gi : g) scale = std::max(scale, std::abs(gi - target));
  std::vector<double> d(g.size()), logw(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = (g[i] - target) / scale;

  auto tilted = [&](double lambda) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      logw[i] = std::log(mu.weights()[i]) + lambda * d[i];
    }
    const double lse = log_sum_exp(logw);
    std::vector<double> w(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) w[i] = std::exp(logw[i] - lse);
    return w;
  };
  auto moment = [&](const std::vector<double>& w) {
    double s = 0;
    for (std::size_t i = 0; i < d.size(); ++i) s += w[i] * d[i];
    return s;
  };

  double lambda = 0;
  std::vector<double> w = tilted(0);
  double f = moment(w);
  if (std::abs(f) * scale > tilt_tol) {
    double lo = 0, hi = 0;
    if (f < 0) {
      hi = 1;
      while (moment(tilted(hi)) < 0) {
        lo = hi;
        hi *= 2;
      }
    } else {
      lo = -1;
      while (moment(tilted(lo)) > 0) {
        hi = lo;
        lo *= 2;
      }
    }
    for (int iter = 0; iter < 4000; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (!(lo < mid && mid < hi)) break;
      lambda = mid;
      w = tilted(lambda);
      f = moment(w);
      if (std::abs(f) * scale <= tilt_tol) break;
      if (f < 0) {
        lo = lambda;
      } else {
        hi = lambda;
      }
    }
  }

  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0) {
      atoms.push_back(mu.atoms()[i]);
      weights.push_back(w[i]);
    }
  }
  DiscreteMeasure nu = DiscreteMeasure::normalized(atoms, weights);
  const double h = rel_entropy(nu, mu);
  const double r = residual_of(nu);
  return TiltSolution{std::move(nu), lambda / scale, h, r};
}

std::optional<TiltSolution> tilt_to_constraint(const DiscreteMeasure& mu,
                                               double x, double tilt_tol) {
  std::vector<double> g(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) g[i] = std::exp(x * mu.atoms()[i]);
  return tilt_linear(mu, g, 1.0, tilt_tol);
}

double loynes_rate(const DiscreteMeasure& mu, double x, double tilt_tol) {
  if (!(x >= 0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument,
                "loynes_rate: x must be finite and >= 0");
  }
  const LoynesResult exponent = loynes_true(DistributionModel(Discrete{mu}));
  const double delta = exponent.status == LoynesStatus::Infinite ? kInf
                                                                  : exponent.value;

  // The constraint f(x) = 1 written as sum nu_i expm1(x b_i)/x = 0, which
  // tends to the mean constraint defining C_0 as x -> 0.
  std::vector<double> g(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double b = mu.atoms()[i];
    g[i] = x > 0 ? std::expm1(x * b) / x : b;
  }
  double s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weights()[i] * g[i];

  // Decreasing branch needs f(x) >= 1, increasing branch f(x) <= 1.
  if (x <= delta ? s >= 0 : s <= 0) return 0;
  const auto sol = tilt_linear(mu, g, 0.0, tilt_tol);
  return sol ? sol->entropy : kInf;
}

namespace {

template <typename Visit>
void for_each_composition(std::size_t k, std::uint64_t n, Visit&& visit) {
  std::vector<std::uint64_t> counts(k, 0);
  // Recursive fill of counts[0..k-1] summing to n, lexicographic order.
  auto rec = [&](auto&& self, std::size_t i, std::uint64_t left) -> void {
    if (i + 1 == k) {
      counts[i] = left;
      visit(counts);
      return;
    }
    for (std::uint64_t c = 0; c <= left; ++c) {
      counts[i] = c;
      self(self, i + 1, left - c);
    }
  };
  rec(rec, 0, n);
}

}  // namespace

double exact_event_log_probability(const DiscreteMeasure& mu, std::uint64_t n,
                                   double theta, double c) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  }
  const std::size_t k = mu.size();
  const double log_count = std::lgamma(double(n + k)) - std::lgamma(double(k)) -
                           std::lgamma(double(n) + 1);
  if (log_count > std::log(kEnumerationCap) + 1e-9) {
    throw Error(ErrorCode::EnumerationTooLarge,
                "C(n+k-1, k-1) exceeds the enumeration cap");
  }
  std::vector<double> e(k), logp(k);
  for (std::size_t i = 0; i < k; ++i) {
    e[i] = std::exp(theta * mu.atoms()[i]);
    logp[i] = std::log(mu.weights()[i]);
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(c));
  const double log_nfact = std::lgamma(double(n) + 1);

  std::vector<double> terms;
  for_each_composition(k, n, [&](const std::vector<std::uint64_t>& counts) {
    double m = 0;
    for (std::size_t i = 0; i < k; ++i) m += double(counts[i]) * e[i];
    m /= double(n);
    if (m > c + slack) return;
    double lt = log_nfact;
    for (std::size_t i = 0; i < k; ++i) {
      if (counts[i] == 0) continue;
      lt += double(counts[i]) * logp[i] - std::lgamma(double(counts[i]) + 1);
    }
    terms.push_back(lt);
  });
  if (terms.empty()) return -kInf;
  return std::min(0.0, log_sum_exp(terms));
}

double exact_event_probability(const DiscreteMeasure& mu, std::uint64_t n,
                               double theta, double c) {
  return std::exp(exact_event_log_probability(mu, n, theta, c));
}

SlopeTable sanov_slope(const DiscreteMeasure& mu, double theta, double c,
                       const std::vector<std::uint64_t>& n_list) {
  SlopeTable table;
  std::vector<double> e(mu.size());
  double m = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    e[i] = std::exp(theta * mu.atoms()[i]);
    m += mu.weights()[i] * e[i];
  }
  if (m <= c) {
    table.prediction = 0;
  } else {
    const auto sol = tilt_linear(mu, e, c);
    table.prediction = sol ? sol->entropy : kInf;
  }
  for (const std::uint64_t n : n_list) {
    const double lp = exact_event_log_probability(mu, n, theta, c);
    const double slope = lp == -kInf ? kInf : (lp == 0 ? 0.0 : -lp / double(n));
    table.rows.push_back({n, lp, slope});
  }
  return table;
}

}  // namespace ldp
