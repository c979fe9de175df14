#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ldp/convex_fn.hpp"
#include "ldp/error.hpp"

namespace ldp {

template <typename Scalar = double>
struct RhoResult {
  Scalar value;      // lattice max of |d(p, epi f) - d(p, epi g)|
  Scalar err_bound;  // true sup over the box is at most value + err_bound
};

/// Attouch-Wets diagnostics for k = 1..K.
template <typename Scalar = double>
struct AwReport {
  std::vector<Scalar> rho;
  std::vector<Scalar> err;
  Scalar composite = 0;  // sum_k 2^-k min(1, rho_k)
};

enum class Membership { In, Out, Undecided };

namespace detail {

// Lattice {(i/c, j/c)} covering [-K, K]^2 with c = ceil(1/h). Returns the
// lattice max of the distance gap restricted to each box [-k, k]^2,
// k = 1..K, and the effective spacing through `spacing`.
template <typename Scalar>
std::vector<Scalar> lattice_gaps(const ExtConvexFn<Scalar>& f,
                                 const ExtConvexFn<Scalar>& g, int K, Scalar h,
                                 Scalar tol, Scalar& spacing) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
  const long c = static_cast<long>(std::ceil(Scalar(1) / h - Scalar(1e-12)));
  spacing = Scalar(1) / Scalar(c);
  const long n = long(K) * c;

  std::vector<Scalar> ring(std::size_t(K) + 1, Scalar(0));
  for (long i = -n; i <= n; ++i) {
    const Scalar x1 = Scalar(i) / Scalar(c);
    for (long j = -n; j <= n; ++j) {
      const EpiPoint<Scalar> p{x1, Scalar(j) / Scalar(c)};
      const Scalar gap = std::abs(epi_dist(f, p, tol) - epi_dist(g, p, tol));
      const long r = std::max(std::labs(i), std::labs(j));
      const std::size_t box = std::size_t((r + c - 1) / c);
      ring[box] = std::max(ring[box], gap);
    }
  }
  std::vector<Scalar> rho(static_cast<std::size_t>(K));
  Scalar running = ring[0];
  for (int k = 1; k <= K; ++k) {
    running = std::max(running, ring[std::size_t(k)]);
    rho[std::size_t(k - 1)] = running;
  }
  return rho;
}

}  // namespace detail

/// Sup over the box [-k, k]^2 of |d(x, epi f) - d(x, epi g)|, approximated by
/// a lattice of spacing at most h. Both distances are 1-Lipschitz in x, so the
/// sup exceeds the lattice max by at most 2h (plus the distance tolerance).
template <typename Scalar>
RhoResult<Scalar> rho_k(const ExtConvexFn<Scalar>& f,
                        const ExtConvexFn<Scalar>& g, int k, Scalar h,
                        Scalar tol = Scalar(1e-9)) {
  Scalar spacing = 0;
  const auto rho = detail::lattice_gaps(f, g, k, h, tol, spacing);
  return {rho.back(), 2 * spacing + 4 * tol};
}

/// Membership of g in V_k(f) = {g : sup_{B_k} |d(x,epi g) - d(x,epi f)| < 1/k}.
///
/// The lattice max is a lower bound for the sup, so Out is certified as soon
/// as it reaches 1/k. In needs the Lipschitz upper bound below 1/k. Otherwise
/// the lattice is halved down to h_min = 1/(1024 k). h <= 0 starts at 1/(8k).
template <typename Scalar>
Membership in_vk(const ExtConvexFn<Scalar>& g, const ExtConvexFn<Scalar>& f,
                 int k, Scalar h = Scalar(0), Scalar tol = Scalar(1e-9)) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const Scalar threshold = Scalar(1) / Scalar(k);
  const Scalar h_min = Scalar(1) / Scalar(1024 * k);
  if (!(h > 0)) h = Scalar(1) / Scalar(8 * k);
  for (;;) {
    const RhoResult<Scalar> r = rho_k(g, f, k, h, tol);
    if (r.value + r.err_bound < threshold) return Membership::In;
    if (r.value >= threshold) return Membership::Out;
    if (h <= h_min) return Membership::Undecided;
    h = std::max(h / 2, h_min);
  }
}

/// rho_1..rho_K on one shared lattice and the composite
/// sum_k 2^-k min(1, rho_k), which lies in [0, 1).
template <typename Scalar>
AwReport<Scalar> aw_composite(const ExtConvexFn<Scalar>& f,
                              const ExtConvexFn<Scalar>& g, int K, Scalar h,
                              Scalar tol = Scalar(1e-9)) {
  Scalar spacing = 0;
  AwReport<Scalar> report;
  report.rho = detail::lattice_gaps(f, g, K, h, tol, spacing);
  report.err.assign(report.rho.size(), 2 * spacing + 4 * tol);
  Scalar weight = 1;
  for (const Scalar r : report.rho) {
    weight /= 2;
    report.composite += weight * std::min(Scalar(1), r);
  }
  return report;
}

template <typename Scalar>
std::vector<AwReport<Scalar>> converge_report(
    const std::vector<ExtConvexFn<Scalar>>& seq,
    const ExtConvexFn<Scalar>& target, int K, Scalar h,
    Scalar tol = Scalar(1e-9)) {
  if (seq.empty()) {
    throw Error(ErrorCode::InvalidArgument, "converge_report: empty sequence");
  }
  std::vector<AwReport<Scalar>> out;
  out.reserve(seq.size());
  for (const auto& f : seq) out.push_back(aw_composite(f, target, K, h, tol));
  return out;
}

}  // namespace ldp
