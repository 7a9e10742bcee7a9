#include "dcss/stationary.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace dcss {

namespace {

// Unique root of the strictly increasing map x -> lambda x^{2p} + q x^4 on
// (0, hi] at level `level`. Bisection down to ~1e-3 relative, then Newton.
double increasing_quartic_root(double lambda, double p, double q, double level, double hi) {
  auto f = [&](double x) { return lambda * std::pow(x, 2.0 * p) + q * x * x * x * x - level; };
  double lo = 0.0;
  for (int i = 0; i < 60 && (hi - lo) > 1e-3 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    const double fx = f(x);
    const double dfx = 2.0 * p * lambda * std::pow(x, 2.0 * p - 1.0) + 4.0 * q * x * x * x;
    const double step = fx / dfx;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * ((fx < 0.0 ? x : lo) + (fx < 0.0 ? hi : x));
    (f(xn) < 0.0 ? lo : hi) = xn;
    if (std::abs(xn - x) <= 1e-16 * x) { x = xn; break; }
    x = xn;
  }
  return x;
}

}  // namespace

double scalar_root_single(const ModelParams& params) {
  params.validate();
  const double q = 0.25 * params.h * params.h;
  // The root is below both single-term bounds.
  const double hi = std::min(std::pow(params.omega / params.lambda, 0.5 / params.p),
                             std::pow(params.omega / q, 0.25)) *
                    (1.0 + 1e-12);
  return increasing_quartic_root(params.lambda, params.p, q, params.omega, hi);
}

double scalar_root_double(const ModelParams& params, double u_single) {
  params.validate();
  if (!(u_single > 0.0))
    throw std::invalid_argument("scalar_root_double: u_single must be positive");
  const double q = 0.25 * params.h * params.h;
  const double level = params.lambda * std::pow(u_single, 2.0 * params.p);
  // At W = u_single the left side exceeds the level by q U^4 > 0.
  return increasing_quartic_root(params.lambda, params.p, q, level, u_single);
}

double continuum_soliton(double x, const ModelParams& params) {
  params.validate();
  const double amp = std::pow(params.omega * (params.p + 1.0) / params.lambda,
                              0.5 / params.p);
  const double arg = std::sqrt(params.omega) * params.p * x;
  return amp * std::pow(1.0 / std::cosh(arg), 1.0 / params.p);
}

RealField sampled_soliton(const LatticeWindow& window, const ModelParams& params) {
  RealField u = RealField::zeros(window);
  for (int n = window.n_min; n <= window.n_max; ++n)
    u.site(n) = continuum_soliton(window.h * n, params);
  return u;
}

RealField stationary_residual(const RealField& u, const ModelParams& params) {
  params.validate();
  if (u.h() != params.h)
    throw std::invalid_argument("stationary_residual: window spacing differs from params.h");
  const RealField g = reconstruct_g(u, 0.0);
  const RealField lap = discrete_laplacian(u);
  RealField out = RealField::zeros(u.window);
  for (int k = 0; k < u.size(); ++k) {
    const double un = u.values[k];
    out.values[k] = (params.lambda * abs_pow_2p(un, params.p) - params.omega +
                     g.values[k]) * un +
                    lap.values[k];
  }
  return out;
}

Eigen::MatrixXd stationary_jacobian(const RealField& u, const ModelParams& params) {
  params.validate();
  if (u.h() != params.h)
    throw std::invalid_argument("stationary_jacobian: window spacing differs from params.h");
  const int n = u.size();
  const double h2 = params.h * params.h;
  const RealField g = reconstruct_g(u, 0.0);

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const double ur = u.values[r];
    jac(r, r) = (2.0 * params.p + 1.0) * params.lambda * abs_pow_2p(ur, params.p) -
                params.omega + g.values[r] + h2 * ur * ur * ur * ur - 2.0 / h2;
    if (r > 0) jac(r, r - 1) += 1.0 / h2;
    if (r + 1 < n) jac(r, r + 1) += 1.0 / h2;
    // Tail-sum coupling to every site at or right of r (diagonal part above).
    for (int m = r + 1; m < n; ++m) {
      const double um = u.values[m];
      jac(r, m) += h2 * um * um * um * ur;
    }
  }
  return jac;
}

Eigen::MatrixXd finite_difference_jacobian(const RealField& u, const ModelParams& params,
                                           double step) {
  const int n = u.size();
  Eigen::MatrixXd jac(n, n);
  RealField probe = u;
  for (int c = 0; c < n; ++c) {
    const double saved = probe.values[c];
    probe.values[c] = saved + step;
    const RealField fp = stationary_residual(probe, params);
    probe.values[c] = saved - step;
    const RealField fm = stationary_residual(probe, params);
    probe.values[c] = saved;
    jac.col(c) = (fp.values - fm.values) / (2.0 * step);
  }
  return jac;
}

const char* to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::single_site: return "single_site";
    case SeedKind::double_site: return "double_site";
    case SeedKind::external_field: return "external_field";
  }
  return "unknown";
}

const char* to_string(NewtonStatus status) {
  switch (status) {
    case NewtonStatus::converged: return "converged";
    case NewtonStatus::max_iterations: return "max_iterations";
    case NewtonStatus::singular_jacobian: return "singular_jacobian";
    case NewtonStatus::line_search_stalled: return "line_search_stalled";
  }
  return "unknown";
}

RealField make_seed(const SeedSpec& seed, const ModelParams& params,
                    const LatticeWindow& window) {
  if (seed.kind == SeedKind::external_field) {
    if (!seed.data) throw std::invalid_argument("make_seed: external_field needs data");
    return *seed.data;
  }
  const int right = seed.center + (seed.kind == SeedKind::double_site ? 1 : 0);
  if (seed.center - window.n_min < 2 || window.n_max - right < 2)
    throw std::invalid_argument("make_seed: seed sites need a margin of 2 inside the window");

  RealField u = RealField::zeros(window);
  const double amp_single = scalar_root_single(params);
  if (seed.kind == SeedKind::single_site) {
    u.site(seed.center) = amp_single;
  } else {
    u.site(seed.center) = scalar_root_double(params, amp_single);
    u.site(seed.center + 1) = amp_single;
  }
  return u;
}

LatticeWindow default_window(const ModelParams& params, int min_half_width) {
  // Tails decay like exp(-kappa n) with cosh(kappa) = 1 + Omega h^2 / 2;
  // pick the half-width so exp(-kappa w) < 1e-12 and let auto-expansion
  // fix underestimates (the left tail can decay more slowly).
  const double kappa = std::acosh(1.0 + 0.5 * params.omega * params.h * params.h);
  int half = static_cast<int>(std::ceil(30.0 / std::max(kappa, 1e-3))) + 4;
  half = std::clamp(half, min_half_width, 20000);
  return LatticeWindow(-half, half, params.h);
}

namespace {

double edge_ratio_of(const RealField& u) {
  const double peak = u.values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  return std::max(std::abs(u.values[0]), std::abs(u.values[u.size() - 1])) / peak;
}

RealField embed_in_window(const RealField& u, const LatticeWindow& wider) {
  RealField out = RealField::zeros(wider);
  for (int n = u.window.n_min; n <= u.window.n_max; ++n)
    if (wider.contains(n)) out.site(n) = u.site(n);
  return out;
}

StationaryState solve_fixed_window(const RealField& seed, const ModelParams& params,
                                   const NewtonOptions& opts) {
  StationaryState st;
  st.params = params;
  st.u = seed;

  RealField f = stationary_residual(st.u, params);
  double fnorm = f.values.template lpNorm<Eigen::Infinity>();

  for (st.iterations = 0; st.iterations < opts.max_iter; ++st.iterations) {
    if (fnorm <= opts.tol) {
      st.converged = true;
      st.status = NewtonStatus::converged;
      break;
    }
    const Eigen::MatrixXd jac = stationary_jacobian(st.u, params);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.rcond() < opts.rcond_floor) {
      st.status = NewtonStatus::singular_jacobian;
      break;
    }
    const Eigen::VectorXd delta = lu.solve(f.values);

    double s = 1.0;
    bool improved = false;
    RealField trial = st.u;
    for (int b = 0; b <= opts.max_backtracks; ++b) {
      trial.values = st.u.values - s * delta;
      const RealField ft = stationary_residual(trial, params);
      const double fn = ft.values.template lpNorm<Eigen::Infinity>();
      if (fn < (1.0 - 1e-4 * s) * fnorm || fn <= opts.tol) {
        st.u = trial;
        f = ft;
        fnorm = fn;
        improved = true;
        break;
      }
      s *= 0.5;
    }
    if (!improved) {
      st.status = NewtonStatus::line_search_stalled;
      break;
    }
  }
  if (!st.converged && st.status == NewtonStatus::converged)
    st.status = NewtonStatus::max_iterations;
  // Converged on the last allowed iteration?
  if (!st.converged && fnorm <= opts.tol) {
    st.converged = true;
    st.status = NewtonStatus::converged;
  }

  st.residual_linf = fnorm;
  st.g = reconstruct_g(st.u, 0.0);
  st.edge_ratio = edge_ratio_of(st.u);
  return st;
}

}  // namespace

StationaryState newton_solve(const RealField& seed, const ModelParams& params,
                             const NewtonOptions& opts) {
  params.validate();
  if (seed.h() != params.h)
    throw std::invalid_argument("newton_solve: seed window spacing differs from params.h");

  StationaryState st = solve_fixed_window(seed, params, opts);
  if (!opts.auto_expand) return st;

  for (int round = 0; round < opts.max_expansions; ++round) {
    if (!st.converged || st.edge_ratio <= opts.boundary_ratio) break;
    const LatticeWindow w = st.u.window;
    const int grow = std::max(8, w.size() / 4);
    const LatticeWindow wider(w.n_min - grow, w.n_max + grow, w.h);
    st = solve_fixed_window(embed_in_window(st.u, wider), params, opts);
  }
  return st;
}

StationaryState newton_solve(const SeedSpec& seed, const ModelParams& params,
                             const NewtonOptions& opts) {
  const LatticeWindow window = default_window(params);
  return newton_solve(make_seed(seed, params, window), params, opts);
}

double state_mass(const StationaryState& state) { return mass(state.u); }

TailConstraint asymmetric_tail_check(const RealField& u, const ModelParams& params) {
  params.validate();
  const int n = u.size();
  const double h2 = params.h * params.h;
  double quintic = 0.0, mixed = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double a = u.values[k], b = u.values[k + 1];
    quintic += a * a * a * a * a * b;
    mixed += b * a * (abs_pow_2p(a, params.p) - abs_pow_2p(b, params.p));
  }
  TailConstraint out;
  out.quintic = quintic;
  out.full = 0.25 * h2 * quintic + params.lambda * mixed;
  return out;
}

TailConstraint asymmetric_tail_check(const StationaryState& state) {
  return asymmetric_tail_check(state.u, state.params);
}

}  // namespace dcss
