#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>

#include "ldp/entropy.hpp"
#include "ldp/estimators.hpp"

namespace ldp {

struct PointMass {
  double a;
};
struct Discrete {
  DiscreteMeasure measure;
};
struct Normal {
  double mean;
  double variance;
};
struct Exponential {
  double rate;
};
/// Density (l1/2) e^{l1 x} for x < 0 and (l2/2) e^{-l2 x} for x >= 0.
struct TwoSidedExp {
  double left_rate;
  double right_rate;
};
struct Uniform {
  double a;
  double b;
};
/// Density proportional to exp(-exp(lambda x)) on x > 0.
struct DoubleExpTail {
  double lambda;
};
/// Density proportional to exp(-exp(x^lambda)) on x > 0, lambda > 1.
struct SuperExpTail {
  double lambda;
};

using ModelVariant = std::variant<PointMass, Discrete, Normal, Exponential,
                                  TwoSidedExp, Uniform, DoubleExpTail,
                                  SuperExpTail>;

/// Built-in distribution with validated parameters.
class DistributionModel {
 public:
  DistributionModel(ModelVariant model);  // NOLINT: implicit by intent
  template <typename M>
    requires std::is_constructible_v<ModelVariant, M>
  DistributionModel(M model)  // NOLINT
      : DistributionModel(ModelVariant(std::move(model))) {}

  const ModelVariant& variant() const noexcept { return model_; }
  double mean() const noexcept { return mean_; }
  /// Canonical model-spec string, e.g. "normal:-1,1".
  std::string to_string() const;

 private:
  ModelVariant model_;
  double mean_ = 0;
};

/// Parses "normal:-1,1", "twosidedexp:1,3", "discrete:@file.json",
/// "discrete:-2:0.5,1:0.5", ...
DistributionModel parse_model(const std::string& spec);

SampleBatch<double> sample(const DistributionModel& model, std::size_t n,
                           std::uint64_t seed);

double mgf(const DistributionModel& model, double theta);
double cgf(const DistributionModel& model, double theta);
double rate(const DistributionModel& model, double x);
bool has_closed_form_cgf(const DistributionModel& model) noexcept;

struct MgfDomain {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
};
MgfDomain mgf_domain(const DistributionModel& model);

struct AlphaBeta {
  double alpha0;
  double beta0;
};
AlphaBeta alpha0_beta0(const DistributionModel& model);

/// splitmix64 finalizer, also used to derive replicate seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace ldp
