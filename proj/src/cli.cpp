#include "ldp/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldp/aw_topology.hpp"
#include "ldp/entropy.hpp"
#include "ldp/error.hpp"
#include "ldp/estimators.hpp"
#include "ldp/fenchel.hpp"
#include "ldp/json_io.hpp"
#include "ldp/loynes.hpp"
#include "ldp/mc_harness.hpp"

namespace ldp {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    case ErrorCode::Infeasible:
    case ErrorCode::EnumerationTooLarge:
    case ErrorCode::UnsupportedModel:
    case ErrorCode::UnsupportedClosedForm:
    case ErrorCode::Unclassified:
    case ErrorCode::EmptyProbeGrid:
      return kExitNumeric;
    default:
      return kExitInput;
  }
}

std::string fmt(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

SampleBatch<double> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InputParse, "cannot open " + path);
  return read_samples_csv(in);
}

Vector<double> grid_from(const std::string& spec) {
  const GridSpec g = parse_grid_spec(spec);
  return uniform_grid(g.lo, g.hi, g.steps);
}

DiscreteMeasure load_measure(const std::string& path) {
  return measure_from_json(read_json_file(path));
}

// "-1:1:5" after an option would be taken for a flag, so glue values that
// start with '-' onto the preceding long option.
std::vector<std::string> glue_negative_values(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--", 0) == 0 && a.find('=') == std::string::npos && i + 1 < argc) {
      const std::string_view next = argv[i + 1];
      if (next.size() > 1 && next[0] == '-' &&
          (std::isdigit(static_cast<unsigned char>(next[1])) || next[1] == '.')) {
        a += '=';
        a += next;
        ++i;
      }
    }
    args.push_back(std::move(a));
  }
  return args;
}

json loynes_json(const LoynesResult& r) {
  json j = {{"status", to_string(r.status)},
            {"value", ext_to_json(r.value)},
            {"bracket", {ext_to_json(r.lo), ext_to_json(r.hi)}},
            {"iterations", r.iterations}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Large-deviation estimators: empirical CGFs, rate functions, "
               "Attouch-Wets diagnostics, Loynes exponents"};
  app.name("ldp");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string samples, grid, what = "cgf";
  auto* estimate = app.add_subcommand("estimate", "empirical MGF/CGF/Jarzynski on a grid");
  estimate->add_option("--samples", samples, "CSV file, one sample per line")->required();
  estimate->add_option("--grid", grid, "lo:hi:steps (0 is inserted)")->required();
  estimate->add_option("--what", what)->check(CLI::IsMember({"mgf", "cgf", "jarzynski"}));

  std::string window;
  auto* rate = app.add_subcommand("rate", "conjugate of the empirical CGF");
  rate->add_option("--samples", samples)->required();
  rate->add_option("--theta-window", window, "lo:hi:steps (0 is inserted)")->required();

  std::string f_path, g_path;
  int depth = 1;
  double h = 0;
  auto* awdist = app.add_subcommand("awdist", "rho_k between two function grids, k = 1..K");
  awdist->set_help_flag("--help", "Print this help message and exit");
  awdist->add_option("--f", f_path)->required();
  awdist->add_option("--g", g_path)->required();
  awdist->add_option("--k", depth)->required()->check(CLI::PositiveNumber);
  awdist->add_option("--h", h, "lattice spacing (default 1/(8k))")->check(CLI::PositiveNumber);

  double tol = kDefaultRootTol;
  auto* loynes = app.add_subcommand("loynes", "Loynes exponent of a sample");
  loynes->add_option("--samples", samples)->required();
  loynes->add_option("--tol", tol)->check(CLI::PositiveNumber);

  std::string mu_path, x_grid;
  auto* lrate = app.add_subcommand("loynes-rate", "rate function of Loynes estimates");
  lrate->add_option("--mu", mu_path, "JSON measure")->required();
  lrate->add_option("--x-grid", x_grid, "lo:hi:steps")->required();

  std::string kind, config_path, out_path, model, n_schedule;
  unsigned workers = 0;
  int replicates = 0;
  std::optional<std::uint64_t> seed;
  bool no_meta = false, csv = false;
  auto* study = app.add_subcommand("study", "seeded Monte Carlo or exact studies");
  study->add_option("kind", kind)->required()->check(CLI::IsMember({"conv", "loynes", "decay"}));
  study->add_option("--config", config_path, "JSON config");
  study->add_option("--model", model, "e.g. normal:0,1");
  study->add_option("--n-schedule", n_schedule, "comma-separated sample sizes");
  study->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
  study->add_option("--seed", seed);
  study->add_option("--workers", workers, "threads (output does not depend on it)");
  study->add_flag("--no-meta", no_meta, "omit timing and version");
  study->add_flag("--csv", csv, "flat CSV instead of JSON");
  study->add_option("--out", out_path, "write here instead of stdout");

  double theta = 1, c = 1;
  std::uint64_t n = 1;
  auto* oracle = app.add_subcommand("oracle", "exact P(M_n(theta) <= c) by enumeration");
  oracle->add_option("--mu", mu_path)->required();
  oracle->add_option("--theta", theta)->required();
  oracle->add_option("--c", c)->required();
  oracle->add_option("--n", n)->required()->check(CLI::PositiveNumber);

  std::vector<std::string> args = glue_negative_values(argc, argv);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*estimate) {
      const auto batch = load_samples(samples);
      const Vector<double> knots = with_zero_knot(grid_from(grid));
      Vector<double> values(knots.size());
      for (Index i = 0; i < knots.size(); ++i) {
        const double t = knots(i);
        values(i) = what == "mgf"   ? mgf_at(batch, t)
                    : what == "cgf" ? cgf_at(batch, t)
                                    : jarzynski_at(batch, t);
      }
      out << grid_to_json(knots, values).dump() << '\n';
    } else if (*rate) {
      const auto batch = load_samples(samples);
      out << fn_to_json(rate_estimate(batch, with_zero_knot(grid_from(window)))).dump()
          << '\n';
    } else if (*awdist) {
      const auto f = fn_from_json(read_json_file(f_path));
      const auto g = fn_from_json(read_json_file(g_path));
      out << "k,rho,err\n";
      for (int k = 1; k <= depth; ++k) {
        const double hk = h > 0 ? h : 1.0 / (8.0 * k);
        const auto r = rho_k(f, g, k, hk);
        out << k << ',' << fmt(r.value) << ',' << fmt(r.err_bound) << '\n';
      }
    } else if (*loynes) {
      out << loynes_json(loynes_estimate(load_samples(samples), tol)).dump() << '\n';
    } else if (*lrate) {
      const auto mu = load_measure(mu_path);
      const Vector<double> xs = grid_from(x_grid);
      out << "x,rate\n";
      for (Index i = 0; i < xs.size(); ++i) {
        out << fmt(xs(i)) << ',' << fmt(loynes_rate(mu, xs(i))) << '\n';
      }
    } else if (*study) {
      StudyConfig cfg;
      if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
      if (!model.empty()) cfg.model = model;
      if (!n_schedule.empty()) {
        cfg.n_schedule.clear();
        std::stringstream ss(n_schedule);
        std::string item;
        while (std::getline(ss, item, ',')) {
          std::uint64_t v = 0;
          auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
          if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw Error(ErrorCode::InvalidArgument, "bad --n-schedule entry '" + item + "'");
          }
          cfg.n_schedule.push_back(v);
        }
      }
      if (replicates > 0) cfg.replicates = replicates;
      if (seed) cfg.master_seed = *seed;
      if (workers > 0) cfg.workers = workers;
      if (!out_path.empty()) cfg.output = out_path;

      const StudyResult result = kind == "conv"     ? convergence_study(cfg)
                                 : kind == "loynes" ? loynes_study(cfg)
                                                    : decay_study(cfg);
      const std::string text =
          csv ? study_to_csv(result) : study_to_json(result, !no_meta).dump(2) + "\n";
      if (cfg.output.empty()) {
        out << text;
      } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) throw Error(ErrorCode::InputParse, "cannot write " + cfg.output);
        file << text;
      }
    } else if (*oracle) {
      const auto mu = load_measure(mu_path);
      const double lp = exact_event_log_probability(mu, n, theta, c);
      out << json{{"n", n},
                  {"theta", theta},
                  {"c", c},
                  {"probability", std::exp(lp)},
                  {"log_probability", ext_to_json(lp)}}
                 .dump()
          << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}

}  // namespace ldp
