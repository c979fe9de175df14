#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ldp/convex_fn.hpp"
#include "ldp/json_io.hpp"
#include "oracles.hpp"

using namespace ldp;
using oracle::kInf;

namespace {

ErrorCode code_of(const std::vector<double>& k, const std::vector<double>& v) {
  try {
    make_fn(k, v);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Unclassified;
}

}  // namespace

TEST_CASE("construction accepts valid grids") {
  const auto abs = make_fn({-1, 0, 1}, {1, 0, 1});
  CHECK(abs.window_lo() == -1);
  CHECK(abs.window_hi() == 1);
  const auto spike = make_fn({0}, {0});
  CHECK(spike(0) == 0);
  CHECK(spike(1e-300) == kInf);
  const auto padded = make_fn({-2, -1, 0, 1}, {kInf, 3, 0, kInf});
  CHECK(padded.first_finite() == 1);
  CHECK(padded.last_finite() == 2);
}

TEST_CASE("construction rejects invalid grids") {
  CHECK(code_of({-1, 0, 1}, {0, 1, 0}) == ErrorCode::NotConvex);
  CHECK(code_of({0, 0, 1}, {0, 0, 0}) == ErrorCode::NonIncreasingKnots);
  CHECK(code_of({1, 0}, {0, 0}) == ErrorCode::NonIncreasingKnots);
  CHECK(code_of({0, 1}, {kInf, kInf}) == ErrorCode::NoFiniteValue);
  CHECK(code_of({0, 1, 2}, {0, kInf, 0}) == ErrorCode::NonContiguousDomain);
  CHECK(code_of({0, 1}, {0}) == ErrorCode::ShapeMismatch);
  CHECK(code_of({}, {}) == ErrorCode::NoFiniteValue);
  CHECK_THROWS_AS(make_fn({0, 1}, {0, -kInf}), Error);
  CHECK_THROWS_AS(make_fn({0, 1}, {0, std::nan("")}), Error);
  CHECK_THROWS_AS(make_fn({0, kInf}, {0, 1}), Error);
}

TEST_CASE("near-linear grids within tolerance are accepted") {
  CHECK_NOTHROW(make_fn({0, 1, 2}, {0, 1 + 2e-10, 2}));
  CHECK_THROWS_AS(make_fn({0, 1, 2}, {0, 1 + 1e-6, 2}), Error);
}

TEST_CASE("eval") {
  const auto abs = make_fn({-1, 0, 1}, {1, 0, 1});
  CHECK(eval(abs, 0.5) == doctest::Approx(0.5));
  CHECK(eval(abs, 2.0) == kInf);
  CHECK(eval(abs, -1.0) == 1);
  const auto line = make_fn({0, 1}, {0, 3});
  CHECK(eval(line, 0.25) == doctest::Approx(0.75));
}

TEST_CASE("eval is exact at every knot") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto f = oracle::random_convex(rng);
    for (Index i = 0; i < f.size(); ++i) CHECK(f(f.knots()(i)) == f.values()(i));
  }
}

TEST_CASE("epi_dist examples") {
  const auto g = make_fn({0}, {0});
  CHECK(epi_dist(g, EpiPoint<double>{2, 0}) == doctest::Approx(2));
  CHECK(epi_dist(g, EpiPoint<double>{0, -1}) == doctest::Approx(1));
  const auto h = make_fn({0, 1.0 / 3}, {1, 0});
  CHECK(epi_dist(h, EpiPoint<double>{0, 1}) == 0);
  CHECK_THROWS_AS(epi_dist(g, EpiPoint<double>{0, 0}, 0.0), Error);
}

TEST_CASE("epi_dist matches a dense brute-force minimum") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> coord(-4, 4);
  for (int t = 0; t < 60; ++t) {
    const auto f = oracle::random_convex(rng, 12);
    double max_slope = 0;
    for (Index i = f.first_finite(); i < f.last_finite(); ++i) {
      max_slope = std::max(max_slope, std::abs(f.slope(i)));
    }
    const double spacing = (f.window_hi() - f.window_lo()) / 20000;
    for (int s = 0; s < 10; ++s) {
      const double x1 = coord(rng), x2 = coord(rng);
      const double fast = epi_dist(f, EpiPoint<double>{x1, x2});
      const double slow = oracle::epi_dist(f, x1, x2, 20000);
      CHECK(fast <= slow + 1e-9);
      CHECK(fast >= slow - (1 + max_slope) * spacing - 1e-9);
    }
  }
}

TEST_CASE("epi_dist properties") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-3, 3), unit(0, 1);
  const double tol = 1e-9;
  for (int t = 0; t < 100; ++t) {
    const auto f = oracle::random_convex(rng, 10);
    // points of the epigraph are at distance 0
    const double th = f.window_lo() + unit(rng) * (f.window_hi() - f.window_lo());
    CHECK(epi_dist(f, EpiPoint<double>{th, f(th) + unit(rng)}) <= 2 * tol);

    // 1-Lipschitz under the box metric
    const EpiPoint<double> p{coord(rng), coord(rng)}, q{coord(rng), coord(rng)};
    const double box = std::max(std::abs(p.x1 - q.x1), std::abs(p.x2 - q.x2));
    CHECK(std::abs(epi_dist(f, p) - epi_dist(f, q)) <= box + 2 * tol);

    // raising f shrinks its epigraph
    Vector<double> raised = f.values();
    for (Index i = 0; i < raised.size(); ++i) raised(i) += 0.5;
    const ExtConvexFn<double> g(f.knots(), raised);
    CHECK(epi_dist(f, p) <= epi_dist(g, p) + 2 * tol);
  }
}

TEST_CASE("interpolation is convex along the window") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int t = 0; t < 100; ++t) {
    const auto f = oracle::random_convex(rng);
    const double a = f.window_lo() + unit(rng) * (f.window_hi() - f.window_lo());
    const double b = f.window_lo() + unit(rng) * (f.window_hi() - f.window_lo());
    const double lam = unit(rng);
    CHECK(f(lam * a + (1 - lam) * b) <= lam * f(a) + (1 - lam) * f(b) + 1e-9);
  }
}

TEST_CASE("lsc_closure_values") {
  const Vector<double> k3 = (Vector<double>(3) << -1, 0, 1).finished();
  const Vector<double> tent = (Vector<double>(3) << 0, 1, 0).finished();
  const Vector<double> env = lsc_closure_values(k3, tent);
  CHECK(env(0) == 0);
  CHECK(env(1) == doctest::Approx(0));
  CHECK(env(2) == 0);

  const Vector<double> single = (Vector<double>(3) << kInf, 0, kInf).finished();
  const Vector<double> same = lsc_closure_values(k3, single);
  CHECK(same(0) == kInf);
  CHECK(same(1) == 0);
  CHECK(same(2) == kInf);

  const Vector<double> k4 = (Vector<double>(4) << -2, -1, 0, 1).finished();
  const Vector<double> convex = (Vector<double>(4) << kInf, 5, 1, 2).finished();
  const Vector<double> kept = lsc_closure_values(k4, convex);
  for (Index i = 0; i < 4; ++i) CHECK(kept(i) == convex(i));

  const Vector<double> none = (Vector<double>(3) << kInf, kInf, kInf).finished();
  CHECK_THROWS_AS(lsc_closure_values(k3, none), Error);
}

TEST_CASE("lsc_closure_values is the greatest convex minorant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-3, 3);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + int(rng() % 15);
    Vector<double> knots(n), raw(n);
    for (Index i = 0; i < n; ++i) {
      knots(i) = double(i) + 0.3 * val(rng) / 3;
      raw(i) = val(rng);
    }
    std::sort(knots.data(), knots.data() + n);
    const Vector<double> env = lsc_closure_values(knots, raw);
    // convex, below raw, and touches raw at both ends
    const ExtConvexFn<double> f(knots, env);
    for (Index i = 0; i < n; ++i) CHECK(env(i) <= raw(i) + 1e-12);
    CHECK(env(0) == raw(0));
    CHECK(env(n - 1) == raw(n - 1));
    // lower hull at knot m: the lowest chord between raw points around m
    for (Index m = 0; m < n; ++m) {
      double lowest = raw(m);
      for (Index i = 0; i <= m; ++i) {
        for (Index j = m + 1; j < n; ++j) {
          const double lam = (knots(j) - knots(m)) / (knots(j) - knots(i));
          lowest = std::min(lowest, lam * raw(i) + (1 - lam) * raw(j));
        }
      }
      CHECK(env(m) == doctest::Approx(lowest).epsilon(1e-12).scale(1));
    }
  }
}

TEST_CASE("uniform_grid keeps its endpoints") {
  const Vector<double> g = uniform_grid(-1.0, 1.0, 5);
  REQUIRE(g.size() == 6);
  CHECK(g(0) == -1);
  CHECK(g(5) == 1);
  CHECK(g(1) == doctest::Approx(-0.6));
}

TEST_CASE("JSON grid round trip is bit exact") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto f = oracle::random_convex(rng);
    const auto text = fn_to_json(f).dump();
    const auto g = fn_from_json(json::parse(text));
    REQUIRE(g.size() == f.size());
    for (Index i = 0; i < f.size(); ++i) {
      CHECK(g.knots()(i) == f.knots()(i));
      CHECK(g.values()(i) == f.values()(i));
    }
  }
  const auto inf = fn_from_json(json::parse(R"({"knots":[0,1],"values":[0,"inf"]})"));
  CHECK(inf(1) == kInf);
  CHECK_THROWS_AS(fn_from_json(json::parse(R"({"knots":[0]})")), Error);
  CHECK_THROWS_AS(fn_from_json(json::parse(R"({"knots":[0],"values":["x"]})")), Error);
}
