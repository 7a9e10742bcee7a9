#pragma once

// Closed-form reconstruction of the gauge fields from the scalar field in
// the spatial gauge A1 = 0, and the reduction of (A0, A2) to the single
// combined potential g = A0 - A2^2:
//
//   A2(n) = beta  - (h/2)   sum_{k>=n} |phi(k)|^2
//   A0(n) = alpha -  h      sum_{k>=n} A2(k) |phi(k)|^2
//   g(n)  = gamma + (h^2/4) sum_{k>=n} |phi(k)|^4
//
// The tail sums run to n_max only; the field is zero beyond the window, so
// no truncation error is introduced relative to the windowed problem.

#include "dcss/lattice.hpp"

namespace dcss {

/// Backward cumulative sum S(n) = sum_{k>=n} w(k) with Neumaier-compensated
/// accumulation; the tail above n_max is zero.
inline Eigen::VectorXd backward_tail_sum(const Eigen::VectorXd& w) {
  const Eigen::Index n = w.size();
  Eigen::VectorXd out(n);
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const double t = sum + w[k];
    if (std::abs(sum) >= std::abs(w[k]))
      comp += (sum - t) + w[k];
    else
      comp += (w[k] - t) + sum;
    sum = t;
    out[k] = sum + comp;
  }
  return out;
}

template <typename Scalar>
Eigen::VectorXd squared_moduli(const Field<Scalar>& f) {
  if constexpr (std::is_same_v<Scalar, double>)
    return f.values.array().square();
  else
    return f.values.array().abs2();
}

/// A2 from the constraint (A2(n+1) - A2(n))/h = |phi(n)|^2 / 2 with
/// A2 -> beta at +infinity. Nondecreasing in n.
template <typename Scalar>
RealField reconstruct_a2(const Field<Scalar>& phi, double beta) {
  const Eigen::VectorXd dens = squared_moduli(phi);
  RealField out = RealField::zeros(phi.window);
  out.values = Eigen::VectorXd::Constant(phi.size(), beta) -
               0.5 * phi.h() * backward_tail_sum(dens);
  return out;
}

/// A0 from the constraint (A0(n+1) - A0(n))/h = A2(n) |phi(n)|^2 with
/// A0 -> alpha at +infinity; a2 must come from reconstruct_a2.
template <typename Scalar>
RealField reconstruct_a0(const Field<Scalar>& phi, const RealField& a2, double alpha) {
  require_same_window(phi.window, a2.window, "reconstruct_a0");
  const Eigen::VectorXd w = a2.values.array() * squared_moduli(phi).array();
  RealField out = RealField::zeros(phi.window);
  out.values = Eigen::VectorXd::Constant(phi.size(), alpha) -
               phi.h() * backward_tail_sum(w);
  return out;
}

/// Combined potential g(n) = gamma + (h^2/4) sum_{k>=n} |f(k)|^4.
/// Satisfies g(n+1) - g(n) = -(h^2/4)|f(n)|^4 and is nonincreasing in n.
template <typename Scalar>
RealField reconstruct_g(const Field<Scalar>& f, double gamma) {
  const Eigen::VectorXd quart = squared_moduli(f).array().square();
  const double h = f.h();
  RealField out = RealField::zeros(f.window);
  out.values = Eigen::VectorXd::Constant(f.size(), gamma) +
               0.25 * h * h * backward_tail_sum(quart);
  return out;
}

/// Full reconstruction in the spatial gauge (a1 identically zero).
template <typename Scalar>
GaugeTriple reconstruct_gauge(const Field<Scalar>& phi, double alpha, double beta) {
  GaugeTriple g = GaugeTriple::zeros(phi.window, alpha, beta);
  g.a2 = reconstruct_a2(phi, beta);
  g.a0 = reconstruct_a0(phi, g.a2, alpha);
  return g;
}

/// The reduced gauge data (g, A0, A2). The two routes to the combined
/// potential agree sitewise when gamma = alpha - beta^2, which is the
/// limit of A0 - A2^2 at +infinity.
struct ReducedGauge {
  RealField g;
  RealField a0;
  RealField a2;
  double gamma = 0.0;
};

template <typename Scalar>
ReducedGauge reduce_gauge(const Field<Scalar>& phi, double alpha, double beta) {
  ReducedGauge r;
  r.gamma = alpha - beta * beta;
  r.a2 = reconstruct_a2(phi, beta);
  r.a0 = reconstruct_a0(phi, r.a2, alpha);
  r.g = reconstruct_g(phi, r.gamma);
  return r;
}

/// Consistency of the two routes to the combined potential: the maximum
/// over window bonds of |D+(a0 - a2^2)(n) - D+ g(n)|. Both differences
/// equal -(h/4)|phi(n)|^4 when the fields come from the reconstructions.
inline double g_consistency_check(const RealField& a0, const RealField& a2,
                                  const RealField& g) {
  require_same_window(a0.window, a2.window, "g_consistency_check");
  require_same_window(a0.window, g.window, "g_consistency_check");
  const int n = a0.size();
  const double h = a0.h();
  double worst = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double combined =
        (a0.values[k + 1] - a2.values[k + 1] * a2.values[k + 1]) -
        (a0.values[k] - a2.values[k] * a2.values[k]);
    const double dg = g.values[k + 1] - g.values[k];
    worst = std::max(worst, std::abs(combined - dg) / h);
  }
  return worst;
}

}  // namespace dcss
