#pragma once

// Time integration of the reduced discrete CSS flow
//
//   i d/dt phi(n) + D- D+ phi(n) + g(n) phi(n) + lambda |phi(n)|^{2p} phi(n) = 0,
//   g(n) = gamma + (h^2/4) sum_{k>=n} |phi(k)|^4,
//
// with an embedded Dormand-Prince 5(4) pair and adaptive step control.
// g is a functional of phi and is recomputed at every stage evaluation.

#include "dcss/gauge.hpp"
#include "dcss/lattice.hpp"

#include <vector>

namespace dcss {

struct EvolutionConfig {
  double t_end = 10.0;
  double dt_initial = 1e-3;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double record_every = 0.5;   // diagnostic sampling interval
  double stability_factor = 0.5;  // explicit-step cap dt <= factor * h^2

  void validate() const {
    if (!(t_end > 0.0)) throw std::invalid_argument("EvolutionConfig: t_end must be positive");
    if (!(dt_initial > 0.0)) throw std::invalid_argument("EvolutionConfig: dt_initial must be positive");
    if (!(abs_tol > 0.0 && rel_tol > 0.0))
      throw std::invalid_argument("EvolutionConfig: tolerances must be positive");
    if (!(record_every > 0.0))
      throw std::invalid_argument("EvolutionConfig: record_every must be positive");
  }
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> mass_series;
  std::vector<double> constraint_series;  // l_inf of r2 per recorded time
  std::vector<std::pair<double, ComplexField>> snapshots;
  long accepted_steps = 0;
  long rejected_steps = 0;

  double mass_drift() const {
    if (mass_series.empty()) return 0.0;
    const double m0 = mass_series.front();
    double worst = 0.0;
    for (double m : mass_series) worst = std::max(worst, std::abs(m - m0));
    return m0 != 0.0 ? worst / m0 : worst;
  }
};

/// Right side d/dt phi = i (D- D+ phi + g phi + lambda |phi|^{2p} phi).
ComplexField rhs(const ComplexField& phi, const ModelParams& params);

/// One Dormand-Prince 5(4) step from phi with step dt. Returns the 5th
/// order solution and the scaled error estimate
///   max_n |e_n| / (abs_tol + rel_tol * max(|phi_n|, |phi_new_n|)),
/// so a value <= 1 means the step passes the tolerance.
struct Rk45Step {
  ComplexField y;
  double scaled_error = 0.0;
};
Rk45Step dopri5_step(const ComplexField& phi, double dt, const ModelParams& params,
                     double abs_tol, double rel_tol);

/// Adaptive integration to config.t_end, recording mass and the constraint
/// residual (gauge reconstructed per snapshot) every record_every time
/// units. Throws std::runtime_error on NaN or step-size underflow.
EvolutionTrace integrate(const ComplexField& phi0, const ModelParams& params,
                         const EvolutionConfig& config);

/// Fixed-step integration (n_steps steps of size dt); used for convergence
/// order measurements.
ComplexField integrate_fixed(const ComplexField& phi0, const ModelParams& params,
                             double dt, long n_steps);

/// Finite-difference-in-time estimate of the sitewise balance law
///   (1/2) d/dt |phi(n)|^2 + D+ Im(conj(phi)(n-1) D+ phi(n-1)) = 0
/// between two consecutive snapshots separated by dt (spatial gauge,
/// a1 = 0). Returns the l_inf over sites; O(dt) for exact flows.
double balance_residual(const ComplexField& phi_before, const ComplexField& phi_after,
                        double dt);

}  // namespace dcss
