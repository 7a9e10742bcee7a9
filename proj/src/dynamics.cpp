#include "dcss/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcss {

ComplexField rhs(const ComplexField& phi, const ModelParams& params) {
  const RealField g = reconstruct_g(phi, params.gamma);
  const ComplexField lap = discrete_laplacian(phi);
  ComplexField out = ComplexField::zeros(phi.window);
  const Complex I(0.0, 1.0);
  for (int k = 0; k < phi.size(); ++k) {
    const Complex z = phi.values[k];
    out.values[k] = I * (lap.values[k] + g.values[k] * z +
                         params.lambda * abs_pow_2p(z, params.p) * z);
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

}  // namespace

Rk45Step dopri5_step(const ComplexField& phi, double dt, const ModelParams& params,
                     double abs_tol, double rel_tol) {
  const LatticeWindow w = phi.window;
  auto eval = [&](const Eigen::VectorXcd& v) {
    return rhs(ComplexField(w, v), params).values;
  };

  const Eigen::VectorXcd& y = phi.values;
  const Eigen::VectorXcd k1 = eval(y);
  const Eigen::VectorXcd k2 = eval(y + dt * (kA21 * k1));
  const Eigen::VectorXcd k3 = eval(y + dt * (kA31 * k1 + kA32 * k2));
  const Eigen::VectorXcd k4 = eval(y + dt * (kA41 * k1 + kA42 * k2 + kA43 * k3));
  const Eigen::VectorXcd k5 = eval(y + dt * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
  const Eigen::VectorXcd k6 =
      eval(y + dt * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));

  Eigen::VectorXcd y5 = y + dt * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
  const Eigen::VectorXcd k7 = eval(y5);  // FSAL stage, also the error probe
  const Eigen::VectorXcd err =
      dt * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

  double scaled = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    scaled = std::max(scaled, std::abs(err[i]) / scale);
  }
  return {ComplexField(w, std::move(y5)), scaled};
}

EvolutionTrace integrate(const ComplexField& phi0, const ModelParams& params,
                         const EvolutionConfig& config) {
  params.validate();
  config.validate();
  if (phi0.h() != params.h)
    throw std::invalid_argument("integrate: initial window spacing differs from params.h");

  const double dt_cap = config.stability_factor * params.h * params.h;
  const double dt_floor = 1e4 * std::numeric_limits<double>::epsilon() * config.t_end;

  EvolutionTrace trace;
  ComplexField phi = phi0;
  double t = 0.0;
  double dt = std::min(config.dt_initial, dt_cap);

  auto record = [&](double time, const ComplexField& f) {
    trace.times.push_back(time);
    trace.mass_series.push_back(mass(f));
    const GaugeTriple gauge = reconstruct_gauge(f, 0.0, 0.0);
    const auto [r0, r2] = constraint_residuals(f, gauge);
    trace.constraint_series.push_back(r2.values.lpNorm<Eigen::Infinity>());
    trace.snapshots.emplace_back(time, f);
  };

  record(0.0, phi);
  double next_record = std::min(config.record_every, config.t_end);

  while (t < config.t_end) {
    const double dt_to_event = std::min(next_record, config.t_end) - t;
    const double dt_try = std::min(dt, dt_to_event);

    const Rk45Step step = dopri5_step(phi, dt_try, params, config.abs_tol, config.rel_tol);
    if (!step.y.all_finite())
      throw std::runtime_error("integrate: NaN/Inf encountered at t = " + std::to_string(t));

    if (step.scaled_error <= 1.0) {
      t += dt_try;
      phi = step.y;
      ++trace.accepted_steps;
      if (t >= next_record - 1e-14 * config.t_end) {
        record(t, phi);
        next_record += config.record_every;
      }
    } else {
      ++trace.rejected_steps;
    }

    const double safety = 0.9 * std::pow(std::max(step.scaled_error, 1e-10), -0.2);
    dt = std::min(dt_try * std::clamp(safety, 0.2, 5.0), dt_cap);
    if (dt < dt_floor)
      throw std::runtime_error("integrate: step size underflow at t = " + std::to_string(t));
  }
  if (trace.times.back() < config.t_end) record(t, phi);
  return trace;
}

ComplexField integrate_fixed(const ComplexField& phi0, const ModelParams& params,
                             double dt, long n_steps) {
  ComplexField phi = phi0;
  for (long i = 0; i < n_steps; ++i) {
    phi = dopri5_step(phi, dt, params, 1.0, 1.0).y;
    if (!phi.all_finite())
      throw std::runtime_error("integrate_fixed: NaN/Inf encountered");
  }
  return phi;
}

double balance_residual(const ComplexField& phi_before, const ComplexField& phi_after,
                        double dt) {
  require_same_window(phi_before.window, phi_after.window, "balance_residual");
  if (!(dt > 0.0)) throw std::invalid_argument("balance_residual: dt must be positive");
  const int n = phi_before.size();
  const double h = phi_before.h();

  // Bond flux J(n) = Im(conj(phi)(n-1) D+ phi(n-1)) at the earlier time.
  auto flux = [&](int k) {
    if (k < 0 || k >= n) return 0.0;
    const Complex next = (k + 1 < n) ? phi_before.values[k + 1] : Complex(0.0);
    const Complex dp = (next - phi_before.values[k]) / h;
    return std::imag(std::conj(phi_before.values[k]) * dp);
  };

  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double ddensity =
        (std::norm(phi_after.values[k]) - std::norm(phi_before.values[k])) / (2.0 * dt);
    const double div = (flux(k) - flux(k - 1)) / h;
    worst = std::max(worst, std::abs(ddensity + div));
  }
  return worst;
}

}  // namespace dcss
