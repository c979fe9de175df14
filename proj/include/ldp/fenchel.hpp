#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ldp/convex_fn.hpp"
#include "ldp/estimators.hpp"

namespace ldp {

namespace detail {

// Vertices of the finite block at which the slope strictly increases. Runs of
// equal slopes (to relative tolerance) collapse into a single segment.
template <typename Scalar>
std::vector<Index> slope_vertices(const ExtConvexFn<Scalar>& f) {
  const auto& k = f.knots();
  const auto& v = f.values();
  Scalar scale = 1;
  for (Index i = f.first_finite(); i < f.last_finite(); ++i) {
    scale = std::max(scale, std::abs(f.slope(i)));
  }
  const Scalar tie = Scalar(1e-12) * scale;
  auto slope = [&](Index a, Index b) { return (v(b) - v(a)) / (k(b) - k(a)); };

  std::vector<Index> verts;
  for (Index i = f.first_finite(); i <= f.last_finite(); ++i) {
    while (verts.size() >= 2) {
      const Index a = verts[verts.size() - 2], m = verts.back();
      if (slope(m, i) <= slope(a, m) + tie) {
        verts.pop_back();
      } else {
        break;
      }
    }
    verts.push_back(i);
  }
  return verts;
}

}  // namespace detail

/// Legendre-Fenchel conjugate f*(x) = sup_theta (theta x - f(theta)).
///
/// f* is piecewise linear with breakpoints at the segment slopes of f; its
/// slope between breakpoints is the knot where the supremum is attained.
/// The output grid spans [slope_min - margin, slope_max + margin] and the
/// linear tails (slopes window_lo and window_hi) are materialized at the two
/// outer knots. Runs in time linear in the knot count.
template <typename Scalar>
ExtConvexFn<Scalar> conjugate(const ExtConvexFn<Scalar>& f,
                              Scalar margin = Scalar(1)) {
  const auto& k = f.knots();
  const auto& v = f.values();
  const std::vector<Index> verts = detail::slope_vertices(f);
  const std::size_t m = verts.size() - 1;  // number of slope segments

  if (m == 0) {
    // f finite at a single point: f* is affine.
    const Scalar t = k(verts[0]), c = v(verts[0]);
    Vector<Scalar> xs(3), ys(3);
    xs << -margin, 0, margin;
    ys << -t * margin - c, -c, t * margin - c;
    return ExtConvexFn<Scalar>(std::move(xs), std::move(ys));
  }

  Vector<Scalar> xs(Index(m) + 2), ys(Index(m) + 2);
  for (std::size_t j = 0; j < m; ++j) {
    const Index a = verts[j], b = verts[j + 1];
    const Scalar s = (v(b) - v(a)) / (k(b) - k(a));
    xs(Index(j) + 1) = s;
    ys(Index(j) + 1) = std::max(k(a) * s - v(a), k(b) * s - v(b));
  }
  const Index first = verts.front(), last = verts.back();
  xs(0) = xs(1) - margin;
  ys(0) = k(first) * xs(0) - v(first);
  xs(Index(m) + 1) = xs(Index(m)) + margin;
  ys(Index(m) + 1) = k(last) * xs(Index(m) + 1) - v(last);
  return ExtConvexFn<Scalar>(std::move(xs), std::move(ys));
}

/// f** restricted to the knots and finite window of f.
template <typename Scalar>
ExtConvexFn<Scalar> biconjugate(const ExtConvexFn<Scalar>& f) {
  const ExtConvexFn<Scalar> back = conjugate(conjugate(f));
  Vector<Scalar> values = Vector<Scalar>::Constant(f.size(), infinity<Scalar>());
  for (Index i = f.first_finite(); i <= f.last_finite(); ++i) {
    values(i) = back(f.knots()(i));
  }
  return ExtConvexFn<Scalar>(f.knots(), std::move(values));
}

/// Rate-function estimate I_n: the conjugate of the empirical CGF restricted
/// to `theta_knots`. Outside the slope range of the window I_n is linear.
template <typename Scalar>
ExtConvexFn<Scalar> rate_estimate(const SampleBatch<Scalar>& batch,
                                  const Vector<Scalar>& theta_knots) {
  return conjugate(snapshot_cgf(batch, theta_knots));
}

}  // namespace ldp
