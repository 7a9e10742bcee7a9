#pragma once

// Lattice field types and gauge-covariant difference calculus for the
// one-dimensional discrete Chern-Simons-Schrodinger (CSS) system.
//
// Scalar fields live on sites n in [n_min, n_max] of a uniform lattice
// with spacing h; the spatial gauge component A1 lives on bonds
// (half-sites n + 1/2). Everything outside the window is treated as
// exactly zero (Dirichlet truncation of the infinite lattice).

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace dcss {

using Complex = std::complex<double>;

/// Finite index window [n_min, n_max] of an infinite lattice with spacing h.
struct LatticeWindow {
  int n_min = 0;
  int n_max = 0;
  double h = 1.0;

  LatticeWindow() = default;
  LatticeWindow(int nmin, int nmax, double spacing)
      : n_min(nmin), n_max(nmax), h(spacing) {
    validate();
  }

  int size() const { return n_max - n_min + 1; }
  int offset(int n) const { return n - n_min; }
  bool contains(int n) const { return n >= n_min && n <= n_max; }

  void validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("LatticeWindow: h must be positive");
    if (n_min >= n_max || size() < 3)
      throw std::invalid_argument("LatticeWindow: need n_min < n_max and at least 3 sites");
  }

  friend bool operator==(const LatticeWindow& a, const LatticeWindow& b) {
    return a.n_min == b.n_min && a.n_max == b.n_max && a.h == b.h;
  }
};

/// A lattice field: one value per site of a window, zero outside.
template <typename Scalar>
struct Field {
  LatticeWindow window;
  Eigen::VectorX<Scalar> values;

  Field() = default;
  Field(LatticeWindow w, Eigen::VectorX<Scalar> v)
      : window(w), values(std::move(v)) {
    if (values.size() != window.size())
      throw std::invalid_argument("Field: value count does not match window size");
  }

  static Field zeros(LatticeWindow w) {
    return Field(w, Eigen::VectorX<Scalar>::Zero(w.size()));
  }

  int size() const { return window.size(); }
  double h() const { return window.h; }

  /// Checked site access (mutable); n is a lattice index, not an array offset.
  Scalar& site(int n) {
    if (!window.contains(n)) throw std::out_of_range("Field::site: index outside window");
    return values[window.offset(n)];
  }
  Scalar site(int n) const {
    if (!window.contains(n)) throw std::out_of_range("Field::site: index outside window");
    return values[window.offset(n)];
  }
  /// Value at site n with the Dirichlet convention: zero outside the window.
  Scalar site_or_zero(int n) const {
    return window.contains(n) ? values[window.offset(n)] : Scalar(0);
  }

  bool all_finite() const { return values.allFinite(); }
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

inline void require_same_window(const LatticeWindow& a, const LatticeWindow& b,
                                const char* what) {
  if (!(a == b))
    throw std::invalid_argument(std::string(what) + ": fields live on different windows");
}

/// Problem parameters: coupling lambda, nonlinearity power p, frequency
/// Omega, lattice spacing h, and the boundary value gamma of the combined
/// potential g at n -> +infinity.
struct ModelParams {
  double lambda = 1.0;
  double p = 1.0;
  double omega = 1.0;
  double h = 1.0;
  double gamma = 0.0;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("ModelParams: lambda must be positive");
    if (!(p > 0.0)) throw std::invalid_argument("ModelParams: p must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("ModelParams: h must be positive");
  }

  ModelParams with_h(double new_h) const {
    ModelParams q = *this;
    q.h = new_h;
    return q;
  }
};

/// Gauge vector: A0 and A2 on sites, A1 on the N-1 bonds of the window
/// (entry k is the bond between sites n_min+k and n_min+k+1), together
/// with the limits alpha of A0 and beta of A2 at n -> +infinity.
struct GaugeTriple {
  RealField a0;
  RealField a2;
  Eigen::VectorXd a1;
  double alpha = 0.0;
  double beta = 0.0;

  const LatticeWindow& window() const { return a0.window; }

  void validate() const {
    require_same_window(a0.window, a2.window, "GaugeTriple");
    if (a1.size() != a0.size() - 1)
      throw std::invalid_argument("GaugeTriple: a1 must have one entry per bond (N-1)");
  }

  static GaugeTriple zeros(LatticeWindow w, double alpha = 0.0, double beta = 0.0) {
    GaugeTriple g;
    g.a0 = RealField::zeros(w);
    g.a2 = RealField::zeros(w);
    g.a1 = Eigen::VectorXd::Zero(w.size() - 1);
    g.alpha = alpha;
    g.beta = beta;
    return g;
  }
};

// ---------------------------------------------------------------------------
// Difference operators (Dirichlet zero padding outside the window)
// ---------------------------------------------------------------------------

/// Forward difference (f(n+1) - f(n)) / h.
template <typename Scalar>
Field<Scalar> forward_difference(const Field<Scalar>& f) {
  const int n = f.size();
  const double h = f.h();
  Field<Scalar> out = Field<Scalar>::zeros(f.window);
  out.values.head(n - 1) = (f.values.tail(n - 1) - f.values.head(n - 1)) / h;
  out.values[n - 1] = -f.values[n - 1] / h;
  return out;
}

/// Backward difference (f(n) - f(n-1)) / h.
template <typename Scalar>
Field<Scalar> backward_difference(const Field<Scalar>& f) {
  const int n = f.size();
  const double h = f.h();
  Field<Scalar> out = Field<Scalar>::zeros(f.window);
  out.values.tail(n - 1) = (f.values.tail(n - 1) - f.values.head(n - 1)) / h;
  out.values[0] = f.values[0] / h;
  return out;
}

/// Second difference (f(n+1) - 2 f(n) + f(n-1)) / h^2.
template <typename Scalar>
Field<Scalar> discrete_laplacian(const Field<Scalar>& f) {
  const int n = f.size();
  const double h2 = f.h() * f.h();
  Field<Scalar> out = Field<Scalar>::zeros(f.window);
  out.values.segment(1, n - 2) =
      (f.values.head(n - 2) - 2.0 * f.values.segment(1, n - 2) + f.values.tail(n - 2)) / h2;
  out.values[0] = (f.values[1] - 2.0 * f.values[0]) / h2;
  out.values[n - 1] = (f.values[n - 2] - 2.0 * f.values[n - 1]) / h2;
  return out;
}

// ---------------------------------------------------------------------------
// Covariant derivatives
// ---------------------------------------------------------------------------

/// D1+ phi(n) = (exp(-i h A1(n+1/2)) phi(n+1) - phi(n)) / h.
inline ComplexField covariant_derivative_plus(const ComplexField& phi,
                                              const Eigen::VectorXd& a1) {
  const int n = phi.size();
  if (a1.size() != n - 1)
    throw std::invalid_argument("covariant_derivative_plus: a1 must have N-1 bond entries");
  const double h = phi.h();
  ComplexField out = ComplexField::zeros(phi.window);
  for (int k = 0; k + 1 < n; ++k)
    out.values[k] = (std::polar(1.0, -h * a1[k]) * phi.values[k + 1] - phi.values[k]) / h;
  out.values[n - 1] = -phi.values[n - 1] / h;
  return out;
}

/// D1- phi(n) = (phi(n) - exp(i h A1(n-1/2)) phi(n-1)) / h.
inline ComplexField covariant_derivative_minus(const ComplexField& phi,
                                               const Eigen::VectorXd& a1) {
  const int n = phi.size();
  if (a1.size() != n - 1)
    throw std::invalid_argument("covariant_derivative_minus: a1 must have N-1 bond entries");
  const double h = phi.h();
  ComplexField out = ComplexField::zeros(phi.window);
  for (int k = 1; k < n; ++k)
    out.values[k] = (phi.values[k] - std::polar(1.0, h * a1[k - 1]) * phi.values[k - 1]) / h;
  out.values[0] = phi.values[0] / h;
  return out;
}

// ---------------------------------------------------------------------------
// Gauge transformation and invariants
// ---------------------------------------------------------------------------

/// Gauge transformation generated by chi (with time derivative chi_dot):
///   phi   -> exp(i chi) phi
///   A0    -> A0 + chi_dot
///   A1    -> A1 + forward_difference(chi)  (on bonds)
///   A2    -> A2
inline std::pair<ComplexField, GaugeTriple> gauge_transform(const ComplexField& phi,
                                                            const GaugeTriple& gauge,
                                                            const RealField& chi,
                                                            const RealField& chi_dot) {
  gauge.validate();
  require_same_window(phi.window, gauge.window(), "gauge_transform");
  require_same_window(phi.window, chi.window, "gauge_transform(chi)");
  require_same_window(phi.window, chi_dot.window, "gauge_transform(chi_dot)");

  const int n = phi.size();
  const double h = phi.h();

  ComplexField phi_t = ComplexField::zeros(phi.window);
  for (int k = 0; k < n; ++k)
    phi_t.values[k] = std::polar(1.0, chi.values[k]) * phi.values[k];

  GaugeTriple out = gauge;
  out.a0.values += chi_dot.values;
  out.a1 += (chi.values.tail(n - 1) - chi.values.head(n - 1)) / h;
  return {std::move(phi_t), std::move(out)};
}

/// Mass M = h * sum_n |phi(n)|^2, the conserved quantity of the flow.
template <typename Scalar>
double mass(const Field<Scalar>& f) {
  return f.h() * f.values.squaredNorm();
}

/// |z|^(2p), evaluated as (|z|^2)^p so the removable limit at z = 0 is exact.
inline double abs_pow_2p(Complex z, double p) {
  const double a2 = std::norm(z);
  return a2 == 0.0 ? 0.0 : std::pow(a2, p);
}
inline double abs_pow_2p(double x, double p) {
  const double a2 = x * x;
  return a2 == 0.0 ? 0.0 : std::pow(a2, p);
}

/// Residuals of the two gauge constraints under the spatial gauge A1 = 0:
///   r0(n) = (A0(n+1) - A0(n))/h - A2(n) |phi(n)|^2
///   r2(n) = (A2(n+1) - A2(n))/h - |phi(n)|^2 / 2
/// At the right edge the gauge fields are continued with their limits
/// (alpha, beta), which is exact when phi vanishes beyond the window.
/// Throws if the gauge is not in the spatial gauge (a1 not identically 0).
inline std::pair<RealField, RealField> constraint_residuals(const ComplexField& phi,
                                                            const GaugeTriple& gauge) {
  gauge.validate();
  require_same_window(phi.window, gauge.window(), "constraint_residuals");
  if ((gauge.a1.array() != 0.0).any())
    throw std::invalid_argument("constraint_residuals: requires the spatial gauge a1 == 0");

  const int n = phi.size();
  const double h = phi.h();
  RealField r0 = RealField::zeros(phi.window);
  RealField r2 = RealField::zeros(phi.window);
  for (int k = 0; k < n; ++k) {
    const double a0_next = (k + 1 < n) ? gauge.a0.values[k + 1] : gauge.alpha;
    const double a2_next = (k + 1 < n) ? gauge.a2.values[k + 1] : gauge.beta;
    const double dens = std::norm(phi.values[k]);
    r0.values[k] = (a0_next - gauge.a0.values[k]) / h - gauge.a2.values[k] * dens;
    r2.values[k] = (a2_next - gauge.a2.values[k]) / h - 0.5 * dens;
  }
  return {std::move(r0), std::move(r2)};
}

/// Residual of the evolution equation
///   i D0 phi + D1- D1+ phi - A2^2 phi + lambda |phi|^{2p} phi = 0
/// with the time derivative phi_t supplied as data (D0 phi = phi_t - i A0 phi).
/// Under a gauge transformation the residual picks up the same unimodular
/// factor as phi, so its sitewise modulus is gauge invariant.
inline ComplexField first_equation_residual(const ComplexField& phi,
                                            const ComplexField& phi_t,
                                            const GaugeTriple& gauge,
                                            const ModelParams& params) {
  gauge.validate();
  require_same_window(phi.window, gauge.window(), "first_equation_residual");
  require_same_window(phi.window, phi_t.window, "first_equation_residual");

  const ComplexField dpp = covariant_derivative_plus(phi, gauge.a1);
  const ComplexField dmp = covariant_derivative_minus(dpp, gauge.a1);

  ComplexField out = ComplexField::zeros(phi.window);
  const Complex I(0.0, 1.0);
  for (int k = 0; k < phi.size(); ++k) {
    const Complex d0 = phi_t.values[k] - I * gauge.a0.values[k] * phi.values[k];
    out.values[k] = I * d0 + dmp.values[k] -
                    gauge.a2.values[k] * gauge.a2.values[k] * phi.values[k] +
                    params.lambda * abs_pow_2p(phi.values[k], params.p) * phi.values[k];
  }
  return out;
}

}  // namespace dcss
