#pragma once

// Stationary bound states phi(t,n) = exp(i Omega t) U(n) of the reduced
// discrete CSS system. The real profile U solves F(U,h) = 0 with
//
//   F(U,h)_n = (lambda |U_n|^{2p} - Omega + G_n) U_n
//              + (U_{n+1} - 2 U_n + U_{n-1}) / h^2,
//   G_n      = (h^2/4) sum_{k>=n} U_k^4,
//
// solved by damped Newton iteration with the analytic Jacobian. Seeds come
// from the decoupled (large-h) limit, where the on-site amplitudes are
// roots of scalar polynomial equations.

#include "dcss/gauge.hpp"
#include "dcss/lattice.hpp"

#include <Eigen/Dense>

#include <optional>

namespace dcss {

// ---------------------------------------------------------------------------
// Scalar amplitude equations of the decoupled lattice
// ---------------------------------------------------------------------------

/// Unique positive root U of  lambda U^{2p} + (h^2/4) U^4 - Omega = 0.
/// The left side is strictly increasing on U > 0, so bisection brackets
/// exactly one root; a Newton polish brings it to ~1e-15 relative.
double scalar_root_single(const ModelParams& params);

/// Unique positive root W of  lambda W^{2p} + (h^2/4) W^4 - lambda U^{2p} = 0,
/// where U = scalar_root_single(params). Always 0 < W < U.
double scalar_root_double(const ModelParams& params, double u_single);

/// Solitary-wave profile of the continuum NLS limit,
///   Q(x) = (Omega (p+1) / lambda)^{1/(2p)} sech^{1/p}(sqrt(Omega) p x),
/// which solves Q'' - Omega Q + lambda Q^{2p+1} = 0.
double continuum_soliton(double x, const ModelParams& params);

/// Q sampled on the lattice: U_n = Q(h n).
RealField sampled_soliton(const LatticeWindow& window, const ModelParams& params);

// ---------------------------------------------------------------------------
// Residual and Jacobian
// ---------------------------------------------------------------------------

/// F(U,h) componentwise; the tail sum G reuses reconstruct_g with gamma = 0.
RealField stationary_residual(const RealField& u, const ModelParams& params);

/// Analytic Jacobian dF/dU: tridiagonal couplings 1/h^2, local diagonal
/// derivative, plus the upper-triangular nonlocal block h^2 U_m^3 U_n
/// (m >= n) from the tail sum.
Eigen::MatrixXd stationary_jacobian(const RealField& u, const ModelParams& params);

/// Central-difference Jacobian of stationary_residual; independent check of
/// the analytic one (it only ever evaluates the residual).
Eigen::MatrixXd finite_difference_jacobian(const RealField& u, const ModelParams& params,
                                           double step = 1e-6);

// ---------------------------------------------------------------------------
// Newton solver
// ---------------------------------------------------------------------------

enum class SeedKind { single_site, double_site, external_field };

const char* to_string(SeedKind kind);

/// Initial guess specification. single_site puts amplitude U(h) at
/// `center`; double_site puts W(h) at `center` and U(h) at `center + 1`;
/// external_field uses the supplied profile.
struct SeedSpec {
  SeedKind kind = SeedKind::single_site;
  int center = 0;
  std::optional<RealField> data;
};

/// Builds the seed profile on the given window. Requires the occupied
/// sites to sit inside the window with a margin of at least two sites.
RealField make_seed(const SeedSpec& seed, const ModelParams& params,
                    const LatticeWindow& window);

/// Window wide enough for exponential tails at these parameters to decay
/// below ~1e-12, centered at 0.
LatticeWindow default_window(const ModelParams& params, int min_half_width = 10);

struct NewtonOptions {
  double tol = 1e-12;           // on ||F||_inf
  int max_iter = 60;
  int max_backtracks = 30;      // Armijo halvings
  double rcond_floor = 1e-14;   // below this the Jacobian counts as singular
  bool auto_expand = true;      // widen the window when tails hit the edge
  double boundary_ratio = 1e-10;
  int max_expansions = 14;
};

enum class NewtonStatus {
  converged,
  max_iterations,
  singular_jacobian,
  line_search_stalled,
};

const char* to_string(NewtonStatus status);

struct StationaryState {
  RealField u;
  RealField g;                  // reconstruct_g(u, 0) at the solution
  ModelParams params;
  double residual_linf = 0.0;
  int iterations = 0;
  bool converged = false;
  NewtonStatus status = NewtonStatus::max_iterations;
  double edge_ratio = 0.0;      // max |U| on the boundary / max |U|
};

/// Damped Newton iteration U <- U - s J^{-1} F with backtracking line
/// search on ||F||_inf. Non-convergence (singular Jacobian, stalled line
/// search, iteration cap) is reported in the returned state, not thrown.
StationaryState newton_solve(const RealField& seed, const ModelParams& params,
                             const NewtonOptions& opts = {});
StationaryState newton_solve(const SeedSpec& seed, const ModelParams& params,
                             const NewtonOptions& opts = {});

/// Mass h sum U_n^2 of a stationary profile.
double state_mass(const StationaryState& state);

// ---------------------------------------------------------------------------
// Solvability constraint diagnostics
// ---------------------------------------------------------------------------

/// The two sums of the solvability constraint obtained by pairing the
/// residual against (U_{n+1} - U_{n-1}):
///   full    = (h^2/4) sum U_n^5 U_{n+1}
///             + lambda sum U_{n+1} U_n (U_n^{2p} - U_{n+1}^{2p})
///   quintic = sum U_n^5 U_{n+1}
/// `full` vanishes (to solver tolerance) for every true solution; the
/// quintic sum alone measures the obstruction to symmetric profiles.
struct TailConstraint {
  double full = 0.0;
  double quintic = 0.0;
};

TailConstraint asymmetric_tail_check(const RealField& u, const ModelParams& params);
TailConstraint asymmetric_tail_check(const StationaryState& state);

}  // namespace dcss
