#include "ldp/loynes.hpp"

#include <cmath>
#include <limits>
#include <type_traits>

#include "ldp/error.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kBracketCap = std::ldexp(1.0, 64);

LoynesResult zero() {
  LoynesResult r;
  r.status = LoynesStatus::Zero;
  return r;
}

LoynesResult infinite(std::string diagnostic = {}) {
  LoynesResult r;
  r.status = LoynesStatus::Infinite;
  r.value = kInf;
  r.lo = kInf;
  r.hi = kInf;
  r.diagnostic = std::move(diagnostic);
  return r;
}

LoynesResult exact(double value) {
  LoynesResult r;
  r.status = LoynesStatus::Finite;
  r.value = r.lo = r.hi = value;
  return r;
}

}  // namespace

const char* to_string(LoynesStatus status) noexcept {
  switch (status) {
    case LoynesStatus::Zero:
      return "Zero";
    case LoynesStatus::Finite:
      return "Finite";
    case LoynesStatus::Infinite:
      return "Infinite";
  }
  return "?";
}

LoynesResult loynes_from_cgf(const std::function<double(double)>& cgf,
                             double mean, double support_max,
                             bool degenerate_at_zero, double root_tol) {
  if (!(root_tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "root_tol must be positive");
  }
  // Lambda == 0 identically: every theta satisfies Lambda(theta) <= 0.
  if (degenerate_at_zero) return infinite();
  // Lambda convex with Lambda'(0) = mean >= 0: nothing positive is feasible.
  if (mean >= 0) return zero();
  // All mass on (-inf, 0]: Lambda is nonincreasing on [0, inf).
  if (support_max <= 0) return infinite();

  LoynesResult r;
  double lo = 0, hi = 1;
  while (cgf(hi) <= 0) {
    lo = hi;
    hi *= 2;
    ++r.iterations;
    if (hi > kBracketCap) {
      return infinite("no sign change of the CGF below 2^64");
    }
  }
  while (hi - lo > root_tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    if (cgf(mid) <= 0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++r.iterations;
  }
  r.status = LoynesStatus::Finite;
  r.lo = lo;
  r.hi = hi;
  r.value = 0.5 * (lo + hi);
  return r;
}

LoynesResult loynes_estimate(const SampleBatch<double>& batch,
                             double root_tol) {
  return loynes_from_cgf([&](double t) { return cgf_at(batch, t); },
                         batch.mean(), batch.max(),
                         batch.min() == 0 && batch.max() == 0, root_tol);
}

LoynesResult loynes_true(const DistributionModel& model, double root_tol) {
  if (!(root_tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "root_tol must be positive");
  }
  return std::visit(
      [&](const auto& m) -> LoynesResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return loynes_from_cgf([&](double t) { return t * m.a; }, m.a, m.a,
                                 m.a == 0, root_tol);
        } else if constexpr (std::is_same_v<T, Discrete>) {
          const auto& mu = m.measure;
          return loynes_from_cgf([&](double t) { return mu.cgf(t); }, mu.mean(),
                                 mu.atoms().back(),
                                 mu.size() == 1 && mu.atoms()[0] == 0, root_tol);
        } else if constexpr (std::is_same_v<T, Normal>) {
          // eta theta + sigma^2 theta^2 / 2 = 0 at theta = -2 eta / sigma^2
          if (m.mean >= 0) return zero();
          return exact(-2 * m.mean / m.variance);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return zero();
        } else if constexpr (std::is_same_v<T, TwoSidedExp>) {
          // M(theta) = 1 reduces to theta (l2 - l1) = 2 theta^2
          if (m.right_rate <= m.left_rate) return zero();
          return exact((m.right_rate - m.left_rate) / 2);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return loynes_from_cgf([&](double t) { return cgf(model, t); },
                                 model.mean(), m.b, false, root_tol);
        } else {
          throw Error(ErrorCode::UnsupportedModel,
                      "no closed-form CGF for " + model.to_string());
        }
      },
      model.variant());
}

double loynes_dual_check(const ExtConvexFn<double>& rate,
                         const std::vector<double>& probe_grid) {
  std::vector<double> probes;
  for (double x : probe_grid) {
    if (x > 0 && std::isfinite(x)) probes.push_back(x);
  }
  if (probes.empty()) {
    throw Error(ErrorCode::EmptyProbeGrid, "no positive probe points");
  }
  for (Index i = 0; i < rate.size(); ++i) {
    const double y = rate.knots()(i);
    if (y > 0) probes.push_back(1 / y);
  }
  double best = kInf;
  for (double x : probes) {
    const double v = rate(1 / x);
    if (std::isfinite(v)) best = std::min(best, x * v);
  }
  return best;
}

}  // namespace ldp
