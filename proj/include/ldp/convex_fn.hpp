#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "ldp/error.hpp"

namespace ldp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <typename Scalar = double>
constexpr Scalar infinity() noexcept {
  return std::numeric_limits<Scalar>::infinity();
}

template <typename Scalar>
bool is_pos_inf(Scalar v) noexcept {
  return v == infinity<Scalar>();
}

/// Proper convex lower-semicontinuous function on the real line, stored as
/// values on a strictly increasing knot sequence.
///
/// Between consecutive finite knots the function is the linear interpolant.
/// Outside the finite window [knots(first_finite), knots(last_finite)] it is
/// +inf. Boundary knots carry their stored value, so the function is closed;
/// a domain-truncated copy of a finite function (a "mimicking" function) is
/// represented by marking the knots past the truncation point as +inf.
template <typename Scalar = double>
class ExtConvexFn {
 public:
  using VectorType = Vector<Scalar>;

  static constexpr Scalar kDefaultConvexTol = Scalar(1e-9);

  ExtConvexFn(VectorType knots, VectorType values,
              Scalar tol_convex = kDefaultConvexTol)
      : knots_(std::move(knots)), values_(std::move(values)) {
    validate(tol_convex);
  }

  const VectorType& knots() const noexcept { return knots_; }
  const VectorType& values() const noexcept { return values_; }
  Index size() const noexcept { return knots_.size(); }

  Index first_finite() const noexcept { return lo_; }
  Index last_finite() const noexcept { return hi_; }
  Scalar window_lo() const noexcept { return knots_(lo_); }
  Scalar window_hi() const noexcept { return knots_(hi_); }

  /// Slope of the finite segment [knots(i), knots(i+1)], lo <= i < hi.
  Scalar slope(Index i) const noexcept {
    return (values_(i + 1) - values_(i)) / (knots_(i + 1) - knots_(i));
  }

  Scalar operator()(Scalar theta) const noexcept {
    if (!(theta >= window_lo() && theta <= window_hi())) {
      return infinity<Scalar>();
    }
    const Scalar* begin = knots_.data() + lo_;
    const Scalar* end = knots_.data() + hi_ + 1;
    const Scalar* it = std::lower_bound(begin, end, theta);
    const Index i = it - knots_.data();
    if (*it == theta) return values_(i);
    // knots(i-1) < theta < knots(i)
    const Scalar a = knots_(i - 1), b = knots_(i);
    const Scalar t = (theta - a) / (b - a);
    return values_(i - 1) + t * (values_(i) - values_(i - 1));
  }

 private:
  void validate(Scalar tol_convex) {
    const Index n = knots_.size();
    if (n != values_.size()) {
      throw Error(ErrorCode::ShapeMismatch,
                  "knots and values differ in length");
    }
    for (Index i = 0; i < n; ++i) {
      if (!std::isfinite(knots_(i))) {
        throw Error(ErrorCode::NonIncreasingKnots, "knots must be finite");
      }
      if (i > 0 && !(knots_(i) > knots_(i - 1))) {
        throw Error(ErrorCode::NonIncreasingKnots,
                    "knots must be strictly increasing");
      }
      if (std::isnan(values_(i)) || values_(i) == -infinity<Scalar>()) {
        throw Error(ErrorCode::NotConvex,
                    "values must be finite or +inf");
      }
    }
    lo_ = -1;
    for (Index i = 0; i < n; ++i) {
      if (std::isfinite(values_(i))) {
        if (lo_ < 0) lo_ = i;
        hi_ = i;
      }
    }
    if (lo_ < 0) {
      throw Error(ErrorCode::NoFiniteValue, "function is +inf everywhere");
    }
    for (Index i = lo_; i <= hi_; ++i) {
      if (!std::isfinite(values_(i))) {
        throw Error(ErrorCode::NonContiguousDomain,
                    "finite values must be contiguous");
      }
    }
    Scalar scale = 1;
    for (Index i = lo_; i < hi_; ++i) scale = std::max(scale, std::abs(slope(i)));
    for (Index i = lo_ + 1; i < hi_; ++i) {
      if (slope(i) - slope(i - 1) < -tol_convex * scale) {
        std::ostringstream msg;
        msg << "slope decreases at knot " << i << " (" << slope(i - 1)
            << " -> " << slope(i) << ")";
        throw Error(ErrorCode::NotConvex, msg.str());
      }
    }
  }

  VectorType knots_;
  VectorType values_;
  Index lo_ = 0;
  Index hi_ = 0;
};

template <typename Scalar>
ExtConvexFn<Scalar> make_fn(
    Vector<Scalar> knots, Vector<Scalar> values,
    Scalar tol_convex = ExtConvexFn<Scalar>::kDefaultConvexTol) {
  return ExtConvexFn<Scalar>(std::move(knots), std::move(values), tol_convex);
}

inline ExtConvexFn<double> make_fn(const std::vector<double>& knots,
                                   const std::vector<double>& values,
                                   double tol_convex = 1e-9) {
  return ExtConvexFn<double>(
      Eigen::Map<const Vector<double>>(knots.data(), Index(knots.size())),
      Eigen::Map<const Vector<double>>(values.data(), Index(values.size())),
      tol_convex);
}

template <typename Scalar>
Scalar eval(const ExtConvexFn<Scalar>& f, Scalar theta) noexcept {
  return f(theta);
}

/// A point in the plane of the epigraph (argument, value).
template <typename Scalar = double>
struct EpiPoint {
  Scalar x1;
  Scalar x2;
};

namespace detail {

// max(|x1 - theta|, (value - x2)_+): box-metric distance from p to the
// vertical half-line above (theta, value).
template <typename Scalar>
Scalar column_dist(const EpiPoint<Scalar>& p, Scalar theta,
                   Scalar value) noexcept {
  return std::max(std::abs(p.x1 - theta), std::max(Scalar(0), value - p.x2));
}

// Exact minimum of column_dist over a segment on which f is linear. The
// objective is convex piecewise linear, so it is minimized at a breakpoint
// or an endpoint.
template <typename Scalar>
Scalar segment_min(const EpiPoint<Scalar>& p, Scalar a, Scalar b, Scalar fa,
                   Scalar fb) noexcept {
  const Scalar s = (fb - fa) / (b - a);
  auto at = [&](Scalar theta) {
    theta = std::clamp(theta, a, b);
    if (theta == a) return column_dist(p, a, fa);
    if (theta == b) return column_dist(p, b, fb);
    return column_dist(p, theta, fa + s * (theta - a));
  };
  Scalar best = std::min(at(a), at(b));
  best = std::min(best, at(p.x1));
  if (s != 0) best = std::min(best, at(a + (p.x2 - fa) / s));
  if (s != 1) best = std::min(best, at((p.x1 - p.x2 + fa - s * a) / (1 - s)));
  if (s != -1) best = std::min(best, at((p.x1 + p.x2 - fa + s * a) / (1 + s)));
  return best;
}

}  // namespace detail

/// Box-metric distance from p to epi(f).
///
/// For fixed theta the inner infimum over b >= f(theta) is
/// max(|x1 - theta|, (f(theta) - x2)_+), a convex function of theta. The
/// minimizing knot is found by binary search on forward differences, then the
/// two adjacent segments are minimized in closed form, so the result is exact
/// up to rounding and always within `tol`.
template <typename Scalar>
Scalar epi_dist(const ExtConvexFn<Scalar>& f, const EpiPoint<Scalar>& p,
                Scalar tol = Scalar(1e-9)) {
  if (!(tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "epi_dist: tol must be positive");
  }
  const auto& k = f.knots();
  const auto& v = f.values();
  const Index lo = f.first_finite(), hi = f.last_finite();
  auto phi = [&](Index i) { return detail::column_dist(p, k(i), v(i)); };

  // first j in [lo, hi) with phi(j+1) >= phi(j); hi if none
  Index left = lo, right = hi;
  while (left < right) {
    const Index mid = left + (right - left) / 2;
    if (phi(mid + 1) >= phi(mid)) {
      right = mid;
    } else {
      left = mid + 1;
    }
  }
  const Index j = left;
  Scalar best = phi(j);
  if (j > lo) {
    best = std::min(best, detail::segment_min(p, k(j - 1), k(j), v(j - 1), v(j)));
  }
  if (j < hi) {
    best = std::min(best, detail::segment_min(p, k(j), k(j + 1), v(j), v(j + 1)));
  }
  return best;
}

/// Lower-semicontinuous convex regularization of raw grid values: the
/// greatest convex minorant of the finite block, evaluated at every knot.
/// Entries outside the finite block stay +inf.
template <typename Scalar>
Vector<Scalar> lsc_closure_values(const Vector<Scalar>& knots,
                                  const Vector<Scalar>& raw) {
  const Index n = knots.size();
  if (raw.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "knots and values differ in length");
  }
  for (Index i = 1; i < n; ++i) {
    if (!(knots(i) > knots(i - 1))) {
      throw Error(ErrorCode::NonIncreasingKnots,
                  "knots must be strictly increasing");
    }
  }
  Index lo = -1, hi = -1;
  for (Index i = 0; i < n; ++i) {
    if (std::isfinite(raw(i))) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (lo < 0) {
    throw Error(ErrorCode::NoFiniteValue, "function is +inf everywhere");
  }
  for (Index i = lo; i <= hi; ++i) {
    if (!std::isfinite(raw(i))) {
      throw Error(ErrorCode::NonContiguousDomain,
                  "finite values must be contiguous");
    }
  }

  // Andrew's monotone chain, lower hull only.
  std::vector<Index> hull;
  auto cross = [&](Index o, Index a, Index b) {
    return (knots(a) - knots(o)) * (raw(b) - raw(o)) -
           (raw(a) - raw(o)) * (knots(b) - knots(o));
  };
  for (Index i = lo; i <= hi; ++i) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), i) <= 0) {
      hull.pop_back();
    }
    hull.push_back(i);
  }

  Vector<Scalar> out = Vector<Scalar>::Constant(n, infinity<Scalar>());
  for (std::size_t h = 0; h < hull.size(); ++h) {
    const Index a = hull[h];
    out(a) = raw(a);
    if (h + 1 == hull.size()) break;
    const Index b = hull[h + 1];
    for (Index i = a + 1; i < b; ++i) {
      const Scalar t = (knots(i) - knots(a)) / (knots(b) - knots(a));
      out(i) = raw(a) + t * (raw(b) - raw(a));
    }
  }
  return out;
}

/// Uniform grid lo, ..., hi with `steps` intervals (steps + 1 knots).
template <typename Scalar = double>
Vector<Scalar> uniform_grid(Scalar lo, Scalar hi, Index steps) {
  if (steps < 1 || !(hi > lo)) {
    throw Error(ErrorCode::InvalidArgument,
                "grid needs hi > lo and at least one step");
  }
  Vector<Scalar> g(steps + 1);
  for (Index i = 0; i <= steps; ++i) {
    g(i) = lo + (hi - lo) * Scalar(i) / Scalar(steps);
  }
  g(steps) = hi;
  return g;
}

}  // namespace ldp
