#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "ldp/convex_fn.hpp"
#include "ldp/error.hpp"

namespace ldp {

/// Ordered i.i.d. observations with cached summary statistics.
template <typename Scalar = double>
class SampleBatch {
 public:
  using VectorType = Vector<Scalar>;

  explicit SampleBatch(VectorType samples) : samples_(std::move(samples)) {
    if (samples_.size() == 0) {
      throw Error(ErrorCode::EmptyBatch, "sample batch must be nonempty");
    }
    if (!samples_.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "samples must be finite");
    }
    min_ = samples_.minCoeff();
    max_ = samples_.maxCoeff();
    mean_ = std::clamp(samples_.mean(), min_, max_);
  }

  explicit SampleBatch(const std::vector<Scalar>& samples)
      : SampleBatch(VectorType(Eigen::Map<const VectorType>(
            samples.data(), Index(samples.size())))) {}

  const VectorType& samples() const noexcept { return samples_; }
  Index size() const noexcept { return samples_.size(); }
  Scalar min() const noexcept { return min_; }
  Scalar max() const noexcept { return max_; }
  Scalar mean() const noexcept { return mean_; }

 private:
  VectorType samples_;
  Scalar min_, max_, mean_;
};

/// Empirical CGF log((1/n) sum exp(theta X_i)) by shifted log-sum-exp.
template <typename Scalar>
Scalar cgf_at(const SampleBatch<Scalar>& batch, Scalar theta) {
  const auto& x = batch.samples();
  const Scalar m = theta >= 0 ? theta * batch.max() : theta * batch.min();
  const Scalar s = ((theta * x.array()) - m).exp().sum();
  return m + std::log(s / Scalar(batch.size()));
}

/// Empirical MGF; +inf once exp(cgf) overflows.
template <typename Scalar>
Scalar mgf_at(const SampleBatch<Scalar>& batch, Scalar theta) {
  return std::exp(cgf_at(batch, theta));
}

/// Lambda_n(theta)/theta, continued by the sample mean at theta = 0.
template <typename Scalar>
Scalar jarzynski_at(const SampleBatch<Scalar>& batch, Scalar theta) {
  if (theta == 0) return batch.mean();
  return cgf_at(batch, theta) / theta;
}

/// Restriction of the empirical CGF to `knots` (which must contain 0).
template <typename Scalar>
ExtConvexFn<Scalar> snapshot_cgf(const SampleBatch<Scalar>& batch,
                                 const Vector<Scalar>& knots) {
  if (!(knots.array() == Scalar(0)).any()) {
    throw Error(ErrorCode::MissingZeroKnot, "theta grid must contain 0");
  }
  Vector<Scalar> values(knots.size());
  for (Index i = 0; i < knots.size(); ++i) values(i) = cgf_at(batch, knots(i));
  return ExtConvexFn<Scalar>(knots, std::move(values));
}

/// Concatenation; the MGF of the result is the size-weighted convex
/// combination of the parts' MGFs.
template <typename Scalar>
SampleBatch<Scalar> merge(const SampleBatch<Scalar>& a,
                          const SampleBatch<Scalar>& b) {
  Vector<Scalar> joined(a.size() + b.size());
  joined << a.samples(), b.samples();
  return SampleBatch<Scalar>(std::move(joined));
}

/// Returns the grid with 0 inserted if it is missing.
template <typename Scalar>
Vector<Scalar> with_zero_knot(const Vector<Scalar>& knots) {
  if ((knots.array() == Scalar(0)).any()) return knots;
  std::vector<Scalar> v(knots.data(), knots.data() + knots.size());
  v.insert(std::upper_bound(v.begin(), v.end(), Scalar(0)), Scalar(0));
  return Eigen::Map<Vector<Scalar>>(v.data(), Index(v.size()));
}

/// One decimal literal per line, no header, blank lines ignored.
inline SampleBatch<double> read_samples_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s(line);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
      s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
      s.remove_suffix(1);
    }
    if (s.empty()) continue;
    if (s.front() == '+') s.remove_prefix(1);
    double x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
      throw Error(ErrorCode::InputParse,
                  "malformed sample on line " + std::to_string(lineno) +
                      ": '" + line + "'");
    }
    values.push_back(x);
  }
  if (values.empty()) {
    throw Error(ErrorCode::EmptyBatch, "no samples in input");
  }
  return SampleBatch<double>(values);
}

}  // namespace ldp
