#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldp/entropy.hpp"
#include "ldp/json_io.hpp"

namespace ldp {

inline constexpr const char* kToolVersion = "0.1.0";

/// Grid given as lo:hi:steps with inclusive endpoints.
struct GridSpec {
  double lo = -1;
  double hi = 1;
  int steps = 40;
};

GridSpec parse_grid_spec(const std::string& text);
std::string to_string(const GridSpec& grid);

struct StudyConfig {
  std::string model = "normal:0,1";
  std::vector<std::uint64_t> n_schedule;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  GridSpec theta_grid;
  int aw_depth = 4;
  double aw_h = 1.0 / 16;
  double sup_lo = -1;  // window for the sup-norm CGF error
  double sup_hi = 1;
  double root_tol = 1e-10;
  // decay study
  std::optional<DiscreteMeasure> mu;
  double theta_star = 1;
  double c = 1;
  std::vector<std::uint64_t> n_list;

  unsigned workers = 1;  // not part of the result: output is worker-independent
  std::string output;
};

StudyConfig config_from_json(const json& j);
json config_to_json(const StudyConfig& cfg);

/// Seed of replicate r at sample size n: splitmix64 chained over
/// (master, n, r), i.e. s(s(s(master) ^ n) ^ r).
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t n,
                             std::uint64_t r) noexcept;

struct ReplicateRecord {
  std::uint64_t n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double aw = 0;       // convergence: AW composite to the true CGF
  double sup_err = 0;  // convergence: max |Lambda_n - Lambda| on the sup window
  double delta = 0;    // loynes: delta_n
  std::string status;  // loynes: Zero | Finite | Infinite
};

struct Quantiles {
  double q25 = 0;
  double q50 = 0;
  double q75 = 0;
};

/// Linear-interpolation quantiles (type 7); +inf entries are allowed.
Quantiles quantiles(std::vector<double> values);

struct SummaryRow {
  std::uint64_t n = 0;
  Quantiles aw, sup_err, delta;
  double frac_zero = 0;
  double frac_infinite = 0;
};

struct StudyResult {
  std::string kind;  // "conv" | "loynes" | "decay"
  StudyConfig config;
  std::vector<ReplicateRecord> records;  // ordered by (n, replicate)
  std::vector<SummaryRow> summary;
  double truth = 0;  // loynes: exponent of the model
  std::string truth_status;
  std::optional<SlopeTable> decay;
  double wall_clock_s = 0;
  std::string version = kToolVersion;
};

StudyResult convergence_study(const StudyConfig& cfg);
StudyResult loynes_study(const StudyConfig& cfg);
StudyResult decay_study(const DiscreteMeasure& mu, double theta, double c,
                        const std::vector<std::uint64_t>& n_list);
StudyResult decay_study(const StudyConfig& cfg);

/// Timing and version live under "meta", dropped when include_meta is false.
json study_to_json(const StudyResult& result, bool include_meta = true);
/// One row per replicate (or per n for decay studies).
std::string study_to_csv(const StudyResult& result);

}  // namespace ldp
