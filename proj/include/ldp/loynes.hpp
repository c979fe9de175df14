#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ldp/convex_fn.hpp"
#include "ldp/distributions.hpp"
#include "ldp/estimators.hpp"

namespace ldp {

enum class LoynesStatus { Zero, Finite, Infinite };

const char* to_string(LoynesStatus status) noexcept;

/// sup{theta : Lambda(theta) <= 0} with a certifying bracket.
struct LoynesResult {
  LoynesStatus status = LoynesStatus::Zero;
  double value = 0;
  double lo = 0;
  double hi = 0;
  int iterations = 0;
  std::string diagnostic;
};

inline constexpr double kDefaultRootTol = 1e-10;

/// Root of a convex CGF with Lambda(0) = 0 on (0, inf), by bracket doubling
/// from 1 (capped at 2^64) then bisection. Case analysis on the mean and the
/// upper end of the support decides Zero/Infinite without root finding.
LoynesResult loynes_from_cgf(const std::function<double(double)>& cgf,
                             double mean, double support_max,
                             bool degenerate_at_zero, double root_tol);

LoynesResult loynes_estimate(const SampleBatch<double>& batch,
                             double root_tol = kDefaultRootTol);

LoynesResult loynes_true(const DistributionModel& model,
                         double root_tol = kDefaultRootTol);

/// inf over probes x > 0 of x I(1/x). Probes are the positive entries of
/// `probe_grid` together with 1/y for every positive knot y of `rate`.
double loynes_dual_check(const ExtConvexFn<double>& rate,
                         const std::vector<double>& probe_grid);

}  // namespace ldp
