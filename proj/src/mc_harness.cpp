#include "ldp/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ldp/aw_topology.hpp"
#include "ldp/distributions.hpp"
#include "ldp/error.hpp"
#include "ldp/estimators.hpp"
#include "ldp/loynes.hpp"

namespace ldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Runs job(i) for i in [0, jobs) on `workers` threads. Each job writes only
// its own slot, so results do not depend on scheduling. The exception of the
// lowest failing job index is rethrown.
template <typename Job>
void run_jobs(std::size_t jobs, unsigned workers, Job&& job) {
  workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<std::size_t>(jobs, 1))));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = jobs;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

void check_schedule(const StudyConfig& cfg) {
  if (cfg.n_schedule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "n_schedule is empty");
  }
  for (std::size_t i = 0; i < cfg.n_schedule.size(); ++i) {
    if (cfg.n_schedule[i] == 0 ||
        (i > 0 && cfg.n_schedule[i] <= cfg.n_schedule[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "n_schedule must be positive and strictly increasing");
    }
  }
  if (cfg.replicates < 1) {
    throw Error(ErrorCode::InvalidArgument, "replicates must be >= 1");
  }
}

std::vector<ReplicateRecord> make_records(const StudyConfig& cfg) {
  std::vector<ReplicateRecord> records;
  for (const std::uint64_t n : cfg.n_schedule) {
    for (int r = 0; r < cfg.replicates; ++r) {
      ReplicateRecord rec;
      rec.n = n;
      rec.replicate = r;
      rec.seed = replicate_seed(cfg.master_seed, n, std::uint64_t(r));
      records.push_back(rec);
    }
  }
  return records;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<std::uint64_t> u64_array(const json& j, const char* key) {
  if (!j.is_array()) {
    throw Error(ErrorCode::InputParse, std::string(key) + " must be an array");
  }
  std::vector<std::uint64_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::InputParse,
                  std::string(key) + " entries must be nonnegative integers");
    }
    out.push_back(v.get<std::uint64_t>());
  }
  return out;
}

json quantiles_json(const Quantiles& q) {
  return {{"q25", ext_to_json(q.q25)},
          {"q50", ext_to_json(q.q50)},
          {"q75", ext_to_json(q.q75)}};
}

}  // namespace

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec g;
  const std::size_t a = text.find(':');
  const std::size_t b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
    throw Error(ErrorCode::InputParse, "grid spec must be lo:hi:steps, got '" + text + "'");
  }
  auto num = [&](std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  const std::string_view sv(text);
  double steps = 0;
  if (!num(sv.substr(0, a), g.lo) || !num(sv.substr(a + 1, b - a - 1), g.hi) ||
      !num(sv.substr(b + 1), steps) || steps != std::floor(steps) || steps < 1 ||
      !(g.hi > g.lo)) {
    throw Error(ErrorCode::InputParse,
                "grid spec must be lo:hi:steps with hi > lo and integer steps >= 1, got '" +
                    text + "'");
  }
  g.steps = int(steps);
  return g;
}

std::string to_string(const GridSpec& grid) {
  return fmt(grid.lo) + ":" + fmt(grid.hi) + ":" + std::to_string(grid.steps);
}

StudyConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InputParse, "config must be a JSON object");
  StudyConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "kind") {
        continue;
      } else if (key == "model") {
        cfg.model = v.get<std::string>();
      } else if (key == "n_schedule") {
        cfg.n_schedule = u64_array(v, "n_schedule");
      } else if (key == "replicates") {
        cfg.replicates = v.get<int>();
      } else if (key == "seed") {
        cfg.master_seed = v.get<std::uint64_t>();
      } else if (key == "theta_grid") {
        cfg.theta_grid = parse_grid_spec(v.get<std::string>());
      } else if (key == "aw_depth") {
        cfg.aw_depth = v.get<int>();
      } else if (key == "aw_h") {
        cfg.aw_h = v.get<double>();
      } else if (key == "sup_window") {
        const auto w = v.get<std::vector<double>>();
        if (w.size() != 2) throw Error(ErrorCode::InputParse, "sup_window is [lo, hi]");
        cfg.sup_lo = w[0];
        cfg.sup_hi = w[1];
      } else if (key == "root_tol") {
        cfg.root_tol = v.get<double>();
      } else if (key == "mu") {
        if (v.is_string()) {
          const auto model = parse_model(v.get<std::string>());
          if (!std::holds_alternative<Discrete>(model.variant())) {
            throw Error(ErrorCode::InputParse, "mu must be a discrete measure");
          }
          cfg.mu = std::get<Discrete>(model.variant()).measure;
        } else {
          cfg.mu = measure_from_json(v);
        }
      } else if (key == "theta_star") {
        cfg.theta_star = v.get<double>();
      } else if (key == "c") {
        cfg.c = v.get<double>();
      } else if (key == "n_list") {
        cfg.n_list = u64_array(v, "n_list");
      } else if (key == "workers") {
        cfg.workers = v.get<unsigned>();
      } else if (key == "output") {
        cfg.output = v.get<std::string>();
      } else {
        throw Error(ErrorCode::InputParse, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InputParse, std::string("config: ") + e.what());
  }
  return cfg;
}

json config_to_json(const StudyConfig& cfg) {
  json j = {
      {"model", cfg.model},
      {"n_schedule", cfg.n_schedule},
      {"replicates", cfg.replicates},
      {"seed", cfg.master_seed},
      {"theta_grid", to_string(cfg.theta_grid)},
      {"aw_depth", cfg.aw_depth},
      {"aw_h", cfg.aw_h},
      {"sup_window", {cfg.sup_lo, cfg.sup_hi}},
      {"root_tol", cfg.root_tol},
      {"theta_star", cfg.theta_star},
      {"c", cfg.c},
      {"n_list", cfg.n_list},
  };
  if (cfg.mu) j["mu"] = measure_to_json(*cfg.mu);
  if (!cfg.output.empty()) j["output"] = cfg.output;
  return j;
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t n,
                             std::uint64_t r) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ n) ^ r);
}

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * double(values.size() - 1);
    const std::size_t i = std::size_t(std::floor(pos));
    const double frac = pos - double(i);
    if (frac == 0 || i + 1 >= values.size() || values[i] == values[i + 1]) {
      return values[i];
    }
    if (std::isinf(values[i + 1])) return values[i + 1];
    return values[i] + frac * (values[i + 1] - values[i]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

StudyResult convergence_study(const StudyConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  check_schedule(cfg);
  const DistributionModel model = parse_model(cfg.model);
  if (!has_closed_form_cgf(model)) {
    throw Error(ErrorCode::UnsupportedModel,
                "convergence study needs a closed-form CGF: " + cfg.model);
  }
  const Vector<double> grid = with_zero_knot(
      uniform_grid(cfg.theta_grid.lo, cfg.theta_grid.hi, cfg.theta_grid.steps));
  Vector<double> truth_values(grid.size());
  for (Index i = 0; i < grid.size(); ++i) truth_values(i) = cgf(model, grid(i));
  const ExtConvexFn<double> truth(grid, truth_values);

  StudyResult result;
  result.kind = "conv";
  result.config = cfg;
  result.records = make_records(cfg);
  run_jobs(result.records.size(), cfg.workers, [&](std::size_t i) {
    ReplicateRecord& rec = result.records[i];
    const auto batch = sample(model, rec.n, rec.seed);
    const auto snap = snapshot_cgf(batch, grid);
    rec.aw = aw_composite(snap, truth, cfg.aw_depth, cfg.aw_h).composite;
    double sup = 0;
    for (Index k = 0; k < grid.size(); ++k) {
      if (grid(k) < cfg.sup_lo || grid(k) > cfg.sup_hi) continue;
      if (!std::isfinite(truth_values(k))) continue;
      sup = std::max(sup, std::abs(snap.values()(k) - truth_values(k)));
    }
    rec.sup_err = sup;
  });

  const auto reps = std::size_t(cfg.replicates);
  for (std::size_t b = 0; b < cfg.n_schedule.size(); ++b) {
    std::vector<double> aw, sup;
    for (std::size_t r = 0; r < reps; ++r) {
      aw.push_back(result.records[b * reps + r].aw);
      sup.push_back(result.records[b * reps + r].sup_err);
    }
    SummaryRow row;
    row.n = cfg.n_schedule[b];
    row.aw = quantiles(aw);
    row.sup_err = quantiles(sup);
    result.summary.push_back(row);
  }
  result.wall_clock_s = seconds_since(start);
  return result;
}

StudyResult loynes_study(const StudyConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  check_schedule(cfg);
  const DistributionModel model = parse_model(cfg.model);
  if (!(model.mean() < 0)) {
    throw Error(ErrorCode::InvalidArgument,
                "loynes study needs a model with negative mean: " + cfg.model);
  }
  const LoynesResult truth = loynes_true(model, cfg.root_tol);

  StudyResult result;
  result.kind = "loynes";
  result.config = cfg;
  result.truth = truth.value;
  result.truth_status = to_string(truth.status);
  result.records = make_records(cfg);
  run_jobs(result.records.size(), cfg.workers, [&](std::size_t i) {
    ReplicateRecord& rec = result.records[i];
    const auto est = loynes_estimate(sample(model, rec.n, rec.seed), cfg.root_tol);
    rec.delta = est.value;
    rec.status = to_string(est.status);
  });

  const auto reps = std::size_t(cfg.replicates);
  for (std::size_t b = 0; b < cfg.n_schedule.size(); ++b) {
    std::vector<double> deltas;
    SummaryRow row;
    row.n = cfg.n_schedule[b];
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rec = result.records[b * reps + r];
      deltas.push_back(rec.delta);
      if (rec.status == "Zero") row.frac_zero += 1;
      if (rec.status == "Infinite") row.frac_infinite += 1;
    }
    row.frac_zero /= double(reps);
    row.frac_infinite /= double(reps);
    row.delta = quantiles(deltas);
    result.summary.push_back(row);
  }
  result.wall_clock_s = seconds_since(start);
  return result;
}

StudyResult decay_study(const DiscreteMeasure& mu, double theta, double c,
                        const std::vector<std::uint64_t>& n_list) {
  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  result.kind = "decay";
  result.config.mu = mu;
  result.config.theta_star = theta;
  result.config.c = c;
  result.config.n_list = n_list;
  result.decay = sanov_slope(mu, theta, c, n_list);
  result.wall_clock_s = seconds_since(start);
  return result;
}

StudyResult decay_study(const StudyConfig& cfg) {
  if (!cfg.mu) {
    throw Error(ErrorCode::InvalidArgument, "decay study needs \"mu\"");
  }
  if (cfg.n_list.empty()) {
    throw Error(ErrorCode::InvalidArgument, "decay study needs \"n_list\"");
  }
  StudyResult result = decay_study(*cfg.mu, cfg.theta_star, cfg.c, cfg.n_list);
  const double elapsed = result.wall_clock_s;
  result.config = cfg;
  result.wall_clock_s = elapsed;
  return result;
}

json study_to_json(const StudyResult& result, bool include_meta) {
  json j;
  j["kind"] = result.kind;
  j["config"] = config_to_json(result.config);
  if (result.kind == "decay" && result.decay) {
    json rows = json::array();
    for (const auto& row : result.decay->rows) {
      rows.push_back({{"n", row.n},
                      {"log_probability", ext_to_json(row.log_probability)},
                      {"slope", ext_to_json(row.slope)}});
    }
    j["decay"] = {{"prediction", ext_to_json(result.decay->prediction)},
                  {"rows", std::move(rows)}};
  } else {
    json records = json::array(), summary = json::array();
    for (const auto& rec : result.records) {
      json r = {{"n", rec.n}, {"replicate", rec.replicate}, {"seed", rec.seed}};
      if (result.kind == "conv") {
        r["aw"] = rec.aw;
        r["sup_err"] = rec.sup_err;
      } else {
        r["status"] = rec.status;
        r["delta"] = ext_to_json(rec.delta);
      }
      records.push_back(std::move(r));
    }
    for (const auto& row : result.summary) {
      json s = {{"n", row.n}};
      if (result.kind == "conv") {
        s["aw"] = quantiles_json(row.aw);
        s["sup_err"] = quantiles_json(row.sup_err);
      } else {
        s["delta"] = quantiles_json(row.delta);
        s["frac_zero"] = row.frac_zero;
        s["frac_infinite"] = row.frac_infinite;
      }
      summary.push_back(std::move(s));
    }
    j["records"] = std::move(records);
    j["summary"] = std::move(summary);
    if (result.kind == "loynes") {
      j["truth"] = {{"status", result.truth_status},
                    {"value", ext_to_json(result.truth)}};
    }
  }
  if (include_meta) {
    j["meta"] = {{"wall_clock_s", result.wall_clock_s},
                 {"version", result.version}};
  }
  return j;
}

std::string study_to_csv(const StudyResult& result) {
  std::ostringstream out;
  if (result.kind == "decay") {
    out << "n,log_probability,slope\n";
    if (result.decay) {
      for (const auto& row : result.decay->rows) {
        out << row.n << ',' << fmt(row.log_probability) << ',' << fmt(row.slope)
            << '\n';
      }
    }
  } else if (result.kind == "conv") {
    out << "n,replicate,seed,aw,sup_err\n";
    for (const auto& r : result.records) {
      out << r.n << ',' << r.replicate << ',' << r.seed << ',' << fmt(r.aw) << ','
          << fmt(r.sup_err) << '\n';
    }
  } else {
    out << "n,replicate,seed,status,delta\n";
    for (const auto& r : result.records) {
      out << r.n << ',' << r.replicate << ',' << r.seed << ',' << r.status << ','
          << fmt(r.delta) << '\n';
    }
  }
  return out.str();
}

}  // namespace ldp
