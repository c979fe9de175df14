// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ldp/aw_topology.hpp"
#include "ldp/cli.hpp"
#include "ldp/distributions.hpp"
#include "ldp/entropy.hpp"
#include "ldp/estimators.hpp"
#include "ldp/fenchel.hpp"
#include "ldp/loynes.hpp"
#include "ldp/mc_harness.hpp"

using namespace ldp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "FAILED ") + what;
}

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ExtConvexFn<double> fn(std::vector<double> k, std::vector<double> v) {
  return make_fn(std::move(k), std::move(v));
}

// ---------------------------------------------------------------------------

Outcome nonconvex_figure() {
  Outcome o;
  const auto g = fn({0}, {0});
  const auto h = fn({0, 1.0 / 3}, {1, 0});
  const auto l = fn({0}, {0.5});
  const double lattice = 1.0 / 256;
  const auto gh = rho_k(g, h, 2, lattice);
  const auto gl = rho_k(g, l, 2, lattice);
  note(o, gh.err_bound <= 1.0 / 64, "err=" + num(gh.err_bound));
  note(o, std::abs(gh.value - 1.0 / 3) <= gh.err_bound, "rho(g,h)=" + num(gh.value));
  note(o, std::abs(gl.value - 0.5) <= gl.err_bound, "rho(g,l)=" + num(gl.value));
  note(o, in_vk(h, g, 2) == Membership::In, "h in V2(g)");
  note(o, in_vk(g, g, 2) == Membership::In, "g in V2(g)");
  note(o, in_vk(l, g, 2) == Membership::Out, "l not in V2(g)");
  return o;
}

// f_n(theta) = e^theta (theta <= 1), e + n(theta - 1) beyond; for n < e the
// kink at 1 is concave and the closed convex hull is used.
ExtConvexFn<double> exp_sequence(int n, const Vector<double>& left, double right) {
  Vector<double> knots(left.size() + 1), values(left.size() + 1);
  knots << left, right;
  for (Index i = 0; i < left.size(); ++i) values(i) = std::exp(left(i));
  values(left.size()) = std::numbers::e + n * (right - 1);
  if (n < std::numbers::e) values = lsc_closure_values(knots, values);
  return ExtConvexFn<double>(knots, values);
}

Outcome aw_examples() {
  Outcome o;
  const int K = 6;
  const double lattice = 1.0 / 32;
  const Vector<double> left = uniform_grid(-3.0 * K, 1.0, 64 * (3 * K + 1));
  Vector<double> fv(left.size());
  for (Index i = 0; i < left.size(); ++i) fv(i) = std::exp(left(i));
  const ExtConvexFn<double> f(left, fv);

  double prev = kInf, last = 0;
  bool decreasing = true;
  std::string trail;
  for (int n = 1; n <= 256; n *= 2) {
    const double c =
        aw_composite(exp_sequence(n, left, 1.0 + 3 * K), f, K, lattice).composite;
    if (!(c < prev)) decreasing = false;
    trail += (trail.empty() ? "" : ",") + num(c, 3);
    prev = last = c;
  }
  note(o, decreasing, "exp composites strictly decreasing [" + trail + "]");
  note(o, last < 0.02, "composite(n=256)=" + num(last));

  const double n = 100;
  const auto spike = fn({0}, {0});
  const auto fn100 = fn({-1 / n, 0, 1 / n}, {0, 1, 2});
  const double c = aw_composite(fn100, spike, K, lattice).composite;
  note(o, c < 0.05, "spike composite(n=100)=" + num(c));
  return o;
}

ExtConvexFn<double> random_convex(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 40);
  std::uniform_real_distribution<double> step(0.01, 1.0), slope(-5, 5), offset(-3, 3);
  const int m = count(rng);
  std::vector<double> slopes(std::size_t(m - 1));
  for (auto& s : slopes) s = slope(rng);
  std::sort(slopes.begin(), slopes.end());
  std::vector<double> knots{offset(rng)}, values{offset(rng)};
  for (int i = 1; i < m; ++i) {
    knots.push_back(knots.back() + step(rng));
    values.push_back(values.back() + slopes[std::size_t(i - 1)] *
                                         (knots.back() - knots[knots.size() - 2]));
  }
  // occasionally pad with infinite knots on either side
  if (rng() % 3 == 0) {
    knots.insert(knots.begin(), knots.front() - 1);
    values.insert(values.begin(), kInf);
  }
  if (rng() % 3 == 0) {
    knots.push_back(knots.back() + 1);
    values.push_back(kInf);
  }
  return make_fn(knots, values);
}

Outcome fenchel_checks() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto f = random_convex(rng);
    const auto ff = biconjugate(f);
    for (Index i = 0; i < f.size(); ++i) {
      const double a = f.values()(i), b = ff(f.knots()(i));
      worst = std::max(worst, std::isinf(a) ? (std::isinf(b) ? 0.0 : kInf) : std::abs(a - b));
    }
  }
  note(o, worst <= 1e-9, "biconjugate max err=" + num(worst));

  const Vector<double> theta = uniform_grid(-5.0, 5.0, 1000);
  const ExtConvexFn<double> quad(theta, theta.array().square() / 2);
  const auto conj = conjugate(quad);
  double qerr = 0;
  for (int i = 0; i <= 8000; ++i) {
    const double x = -4 + i * 1e-3;
    qerr = std::max(qerr, std::abs(conj(x) - x * x / 2));
  }
  note(o, qerr <= 1e-3, "quadratic conjugate err=" + num(qerr));

  const auto absf = conjugate(fn({-1, 0, 1}, {1, 0, 1}));
  bool exact = true;
  for (Index i = 0; i < absf.size(); ++i) {
    const double x = absf.knots()(i);
    exact = exact && absf.values()(i) == std::max(0.0, std::abs(x) - 1);
  }
  note(o, exact, "|theta| conjugate exact at " + std::to_string(absf.size()) + " breakpoints");
  return o;
}

Outcome loynes_checks() {
  Outcome o;
  const double golden = std::log((1 + std::sqrt(5.0)) / 2);
  const SampleBatch<double> batch(std::vector<double>{-2, 1});
  const auto est = loynes_estimate(batch);
  note(o, est.status == LoynesStatus::Finite && std::abs(est.value - golden) <= 1e-9,
       "estimate=" + num(est.value, 12));
  const auto normal = loynes_true(Normal{-1, 1});
  note(o, normal.value == 2.0, "Normal(-1,1)=" + num(normal.value, 17));
  const auto tse = loynes_true(TwoSidedExp{1, 3});
  note(o, std::abs(tse.value - 1) <= 1e-9, "TwoSidedExp(1,3)=" + num(tse.value, 12));

  const auto rate = rate_estimate(batch, with_zero_knot(uniform_grid(-4.0, 4.0, 800)));
  std::vector<double> probes;
  for (int i = 1; i <= 2000; ++i) probes.push_back(i * 0.01);
  const double dual = loynes_dual_check(rate, probes);
  note(o, std::abs(dual - est.value) <= 0.02, "dual=" + num(dual));
  return o;
}

Outcome weak_law() {
  Outcome o;
  StudyConfig cfg;
  cfg.model = "normal:0,1";
  cfg.n_schedule = {100, 1000, 10000};
  cfg.replicates = 50;
  cfg.master_seed = 12345;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  const StudyResult r = convergence_study(cfg);
  std::string aw, sup;
  bool decreasing = true, scaling = true;
  for (std::size_t i = 0; i < r.summary.size(); ++i) {
    aw += (i ? "," : "") + num(r.summary[i].aw.q50, 3);
    sup += (i ? "," : "") + num(r.summary[i].sup_err.q50, 3);
    if (i == 0) continue;
    decreasing = decreasing && r.summary[i].aw.q50 < r.summary[i - 1].aw.q50;
    const double ratio = r.summary[i - 1].sup_err.q50 / r.summary[i].sup_err.q50;
    scaling = scaling && ratio >= 1.5 && ratio <= 6;
    sup += " (x" + num(ratio, 3) + ")";
  }
  note(o, decreasing, "median aw [" + aw + "]");
  note(o, scaling, "median sup err [" + sup + "]");
  return o;
}

Outcome exact_slope() {
  Outcome o;
  const DiscreteMeasure mu({-1, 1}, {0.7, 0.3});
  const double p1 = exact_event_probability(mu, 1, 1, 1);
  const double p2 = exact_event_probability(mu, 2, 1, 1);
  note(o, std::abs(p1 - 0.7) <= 1e-12, "P1=" + num(p1, 15));
  note(o, std::abs(p2 - 0.49) <= 1e-12, "P2=" + num(p2, 15));
  const SlopeTable t = sanov_slope(mu, 1, 1, {40});
  const double slope = t.rows.front().slope;
  const double rel = std::abs(slope - t.prediction) / t.prediction;
  note(o, rel <= 0.25,
       "slope(40)=" + num(slope) + " vs prediction " + num(t.prediction) +
           " (rel diff " + num(rel, 3) + ")");
  return o;
}

Outcome ilo_shape() {
  Outcome o;
  const DiscreteMeasure mu({-2, 1}, {0.5, 0.5});
  const double delta = loynes_true(Discrete{mu}).value;
  const Vector<double> xs = uniform_grid(0.0, 2.0, 49);
  std::vector<double> v;
  for (Index i = 0; i < xs.size(); ++i) v.push_back(loynes_rate(mu, xs(i)));
  bool finite = true;
  for (double x : v) finite = finite && std::isfinite(x);
  note(o, finite, "finite on " + std::to_string(v.size()) + " points");

  const std::size_t m = std::size_t(std::min_element(v.begin(), v.end()) - v.begin());
  bool shape = m > 0 && m + 1 < v.size();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    shape = shape && (i < m ? v[i + 1] < v[i] : v[i + 1] > v[i]);
  }
  note(o, shape, "decreasing then increasing, min at x=" + num(xs(Index(m)), 4));
  const double at_delta = loynes_rate(mu, delta);
  note(o, std::abs(at_delta) <= 1e-8, "I(delta)=" + num(at_delta));
  bool positive = true;
  for (Index i = 0; i < xs.size(); ++i) {
    if (xs(i) >= delta + 0.05) positive = positive && v[std::size_t(i)] > 0;
  }
  note(o, positive, "positive beyond delta+0.05");
  return o;
}

Outcome alpha_beta_table() {
  Outcome o;
  auto check = [&](const DistributionModel& m, double a, double b) {
    const auto ab = alpha0_beta0(m);
    note(o, ab.alpha0 == a && ab.beta0 == b,
         m.to_string() + "->(" + num(ab.alpha0) + "," + num(ab.beta0) + ")");
  };
  check(Uniform{0, 1}, -kInf, kInf);
  check(PointMass{0.5}, -kInf, kInf);
  check(Discrete{DiscreteMeasure({-1, 2}, {0.5, 0.5})}, -kInf, kInf);
  check(Normal{0.3, 2}, 0, 0);
  check(DoubleExpTail{1.5}, -kInf, 1.5);
  check(SuperExpTail{2}, -kInf, kInf);
  check(Exponential{1}, -kInf, 0);
  return o;
}

std::string run(const std::vector<std::string>& args, int& code) {
  std::vector<const char*> argv{"ldp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = run_cli(int(argv.size()), argv.data(), out, err);
  return out.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "ldp_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"conv", R"({"model":"discrete:-1:0.4,2:0.6","n_schedule":[20,200],
                  "replicates":6,"seed":99,"aw_depth":3,"aw_h":0.125})"},
      {"loynes", R"({"model":"normal:-1,1","n_schedule":[10,100,1000],
                    "replicates":8,"seed":7})"},
      {"decay", R"({"mu":{"atoms":[-1,1],"weights":[0.7,0.3]},"theta_star":1,
                   "c":1,"n_list":[5,10,20]})"},
  };
  for (const auto& [kind, text] : configs) {
    const auto path = (dir / (kind + ".json")).string();
    std::ofstream(path) << text;
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "4", "1", "3"}) {
      int code = 0;
      outputs.push_back(run({"study", kind, "--config", path, "--workers", workers,
                             "--no-meta"},
                            code));
      if (code != 0) note(o, false, kind + " exit code " + std::to_string(code));
    }
    bool same = !outputs.front().empty();
    for (const auto& s : outputs) same = same && s == outputs.front();
    note(o, same, kind + " identical over 4 runs (workers 1,4,1,3)");
  }
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "nonconvex base example", 1, nonconvex_figure},
      {2, "AW convergence examples", 10, aw_examples},
      {3, "Fenchel involution and analytic conjugates", 30, fenchel_checks},
      {4, "Loynes closed forms", 5, loynes_checks},
      {5, "weak-law scaling", 120, weak_law},
      {6, "exact LDP slope", 60, exact_slope},
      {7, "I_Lo shape", 10, ilo_shape},
      {8, "alpha0/beta0 table", 1, alpha_beta_table},
      {9, "determinism", 60, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) note(o, false, "runtime over " + num(c.budget_s) + " s");
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s (%.2f s) %s\n", c.id, c.name,
                o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
