#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ldp/convex_fn.hpp"

namespace ldp {

/// Finitely supported probability measure: strictly increasing atoms with
/// positive weights summing to one (to 1e-12).
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights);

  /// Same as the constructor but rescales weights to sum to one first.
  static DiscreteMeasure normalized(std::vector<double> atoms,
                                    std::vector<double> weights);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double mean() const noexcept;
  /// log sum_i p_i exp(theta b_i), by shifted log-sum-exp.
  double cgf(double theta) const noexcept;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// H(nu | mu) = sum nu_i log(nu_i / mu_i); +inf if nu charges an atom mu does
/// not.
double rel_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

/// Minimizer of H(nu | mu) under sum_i nu_i g_i = target.
struct TiltSolution {
  DiscreteMeasure measure;
  double multiplier = 0;  // lambda in nu_i ∝ mu_i exp(lambda g_i)
  double entropy = 0;
  double constraint_residual = 0;  // sum nu_i g_i - target
};

/// Exponential tilt of mu solving sum nu_i g_i = target. nullopt when target
/// lies outside [min g, max g]. On the boundary the minimizer is mu
/// conditioned on the extremal atoms.
std::optional<TiltSolution> tilt_linear(const DiscreteMeasure& mu,
                                        const std::vector<double>& g,
                                        double target, double tilt_tol = 1e-10);

/// Minimizes H(nu | mu) subject to sum nu_i exp(x b_i) = 1.
std::optional<TiltSolution> tilt_to_constraint(const DiscreteMeasure& mu,
                                               double x,
                                               double tilt_tol = 1e-10);

/// Rate function of Loynes-exponent estimates for finitely supported mu,
/// evaluated at x in [0, inf). +inf when the constraint is unattainable.
double loynes_rate(const DiscreteMeasure& mu, double x,
                   double tilt_tol = 1e-10);

/// Exact P(M_n(theta) <= c) for n i.i.d. draws from mu, by enumerating atom
/// counts. Also see exact_event_log_probability.
double exact_event_probability(const DiscreteMeasure& mu, std::uint64_t n,
                               double theta, double c);
double exact_event_log_probability(const DiscreteMeasure& mu, std::uint64_t n,
                                   double theta, double c);

/// Compositions of n into k parts; enumeration refuses more than this.
inline constexpr double kEnumerationCap = 1e7;

struct SlopeRow {
  std::uint64_t n;
  double log_probability;
  double slope;  // -(1/n) log P, +inf when P = 0
};

struct SlopeTable {
  std::vector<SlopeRow> rows;
  /// inf H(nu | mu) over {nu : sum nu_i exp(theta b_i) <= c}; +inf when empty.
  double prediction;
};

SlopeTable sanov_slope(const DiscreteMeasure& mu, double theta, double c,
                       const std::vector<std::uint64_t>& n_list);

}  // namespace ldp
