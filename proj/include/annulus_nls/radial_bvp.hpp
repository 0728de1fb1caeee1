#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/interpolate.hpp"
#include "annulus_nls/mesh.hpp"
#include "annulus_nls/ode.hpp"
#include "annulus_nls/problem.hpp"
#include "annulus_nls/rootfind.hpp"
#include "annulus_nls/tridiag.hpp"

namespace annulus_nls::bvp {

using numerics::Mesh;

// First Dirichlet eigenvalue of -(u'' + ((N-1)/r)u') on (1,2), by shooting on the
// linear equation and locating the sign change of u(2; lambda). Cached per N.
inline double first_dirichlet_eigenvalue(int N) {
  if (N < 2) throw InvalidParameterError("first_dirichlet_eigenvalue: N must be >= 2");
  static std::mutex mu;
  static std::map<int, double> cache;
  {
    std::lock_guard lk(mu);
    if (auto it = cache.find(N); it != cache.end()) return it->second;
  }
  auto end_value = [N](double lam) {
    auto res = numerics::integrate_radial_ivp(
        N, [lam](double u) { return -lam * u; }, numerics::kInnerRadius, 0.0, 1.0,
        numerics::kOuterRadius, 1e-12, false);
    return res.u.back();
  };
  const double pi2 = std::numbers::pi * std::numbers::pi;
  // the substitution v = r^{(N-1)/2} u shifts the potential by (N-1)(N-3)/(4r^2)
  const double shift = std::max(0.0, (N - 1.0) * (N - 3.0) / 4.0);
  numerics::RootBracket br{pi2 - 1.0, pi2 + shift + 1.0, 0.0, 0.0};
  br.f_lo = end_value(br.lo);
  br.f_hi = end_value(br.hi);
  const double lam = numerics::find_root(end_value, br, 1e-10);
  std::lock_guard lk(mu);
  cache.emplace(N, lam);
  return lam;
}

struct ShotResult {
  double s = 0.0;                    // initial slope u'(1)
  std::optional<double> first_zero;  // first r in (1,2] with u = 0, if any
  double end_value = 0.0;            // u at the last integrated point
  bool overflowed = false;
  numerics::IvpResult path;
};

// Integrate the nonlinear profile equation from r=1 with u(1)=0, u'(1)=s.
inline ShotResult shoot(const ProblemSpec& spec, double s, bool stop_at_zero = true) {
  spec.validate();
  if (!(s > 0.0)) throw InvalidParameterError("shoot: initial slope must be positive");
  const double lam = spec.lambda, pm1 = spec.p - 1.0;
  auto f = [lam, pm1](double u) {
    return lam * u - (u > 0.0 ? std::pow(u, pm1) : 0.0);
  };
  ShotResult shot;
  shot.s = s;
  shot.path = numerics::integrate_radial_ivp(spec.N, f, numerics::kInnerRadius, 0.0, s,
                                             numerics::kOuterRadius, 1e-12, stop_at_zero);
  shot.first_zero = shot.path.first_zero;
  shot.end_value = shot.path.u.back();
  shot.overflowed = shot.path.overflowed;
  return shot;
}

// A converged ground-state profile on a uniform mesh, endpoints exactly zero.
struct Profile {
  ProblemSpec spec;
  Mesh mesh;
  std::vector<double> u;
  double s_slope = 0.0;       // one-sided u'(1) estimate
  double u_max = 0.0;         // grid maximum
  double r_bar = 0.0;         // parabolic peak location
  double residual_inf = 0.0;  // max interior finite-difference residual
};

inline std::vector<double> residual_vector(const ProblemSpec& spec, const Mesh& mesh,
                                           std::span<const double> u) {
  const std::size_t n = mesh.size();
  if (u.size() != n || !mesh.uniform_step)
    throw InvalidParameterError("residual_vector: profile does not match a uniform mesh");
  const double h = *mesh.uniform_step, pm1 = spec.p - 1.0;
  const double drift = (spec.N - 1.0);
  std::vector<double> F(n, 0.0);
  F[0] = u[0];
  F[n - 1] = u[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) +
                       drift / mesh.nodes[i] * (u[i + 1] - u[i - 1]) / (2.0 * h);
    const double nl = u[i] > 0.0 ? std::pow(u[i], pm1) : 0.0;
    F[i] = -lap + spec.lambda * u[i] - nl;
  }
  return F;
}

inline double residual_inf_norm(const ProblemSpec& spec, const Mesh& mesh,
                                std::span<const double> u) {
  double m = 0.0;
  for (double f : residual_vector(spec, mesh, u)) m = std::max(m, std::abs(f));
  return m;
}

inline double residual(const Profile& prof) {
  return residual_inf_norm(prof.spec, prof.mesh, prof.u);
}

namespace detail {

// Damped Newton on the centered finite-difference system. The convergence target
// cannot beat the cancellation floor of the discrete operator (~eps*u_max/h^2),
// so the effective tolerance is the larger of the two.
inline std::vector<double> newton_solve(const ProblemSpec& spec, const Mesh& mesh,
                                        std::vector<double> u) {
  const std::size_t n = mesh.size();
  const double h = *mesh.uniform_step;
  const double pm1 = spec.p - 1.0, pm2 = spec.p - 2.0;
  const double drift = (spec.N - 1.0);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  u[0] = u[n - 1] = 0.0;

  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  auto tol_eff = [&](double umax) {
    const double scale = std::max(1.0, std::pow(std::max(umax, 0.0), pm1));
    const double floor = 4.0 * eps * std::max(umax, 0.0) / (h * h);
    return std::max(1e-12 * scale, floor);
  };

  std::vector<double> F = residual_vector(spec, mesh, u);
  double res = inf_norm(F);
  std::vector<double> sub(n - 2), diag(n - 2), sup(n - 2), rhs(n - 2);
  std::vector<double> utry(n);

  for (int iter = 0; iter < 60; ++iter) {
    const double umax = *std::max_element(u.begin(), u.end());
    if (res <= tol_eff(umax)) return u;

    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double r = mesh.nodes[i];
      sub[i - 1] = -1.0 / (h * h) + drift / (2.0 * h * r);
      sup[i - 1] = -1.0 / (h * h) - drift / (2.0 * h * r);
      const double dnl = u[i] > 0.0 ? pm1 * std::pow(u[i], pm2) : 0.0;
      diag[i - 1] = 2.0 / (h * h) + spec.lambda - dnl;
      rhs[i - 1] = -F[i];
    }
    const std::vector<double> delta = numerics::solve_tridiagonal(sub, diag, sup, rhs);

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      utry[0] = utry[n - 1] = 0.0;
      for (std::size_t i = 1; i + 1 < n; ++i) utry[i] = u[i] + t * delta[i - 1];
      std::vector<double> Ftry = residual_vector(spec, mesh, utry);
      const double rtry = inf_norm(Ftry);
      if (rtry < res) {
        u.swap(utry);
        F.swap(Ftry);
        res = rtry;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // stalled: accept only if we are within a modest factor of the attainable floor
      if (res <= 32.0 * tol_eff(umax)) return u;
      std::ostringstream msg;
      msg << "newton_solve: stalled at residual " << res << " (lambda=" << spec.lambda
          << ", p=" << spec.p << ", n=" << n << ")";
      throw ConvergenceError(msg.str());
    }
  }
  const double umax = *std::max_element(u.begin(), u.end());
  if (res <= 32.0 * tol_eff(umax)) return u;
  std::ostringstream msg;
  msg << "newton_solve: no convergence in 60 iterations, residual " << res
      << " (lambda=" << spec.lambda << ", p=" << spec.p << ", n=" << n << ")";
  throw ConvergenceError(msg.str());
}

// Validates positivity, unimodality, endpoint zeros and the residual bound, then
// fills the derived fields. Spurious continuation branches show up as sign dips
// or extra humps, so these checks gate every accepted step.
inline Profile build_profile(const ProblemSpec& spec, Mesh mesh, std::vector<double> u) {
  const std::size_t n = mesh.size();
  const double h = *mesh.uniform_step;
  Profile prof;
  prof.spec = spec;

  double umax = 0.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (u[i] > umax) {
      umax = u[i];
      imax = i;
    }
  if (!(umax > 0.0)) throw SolverError("build_profile: profile collapsed to zero");

  u[0] = u[n - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (u[i] < 0.0) {
      if (u[i] < -1e-10 * umax) {
        std::ostringstream msg;
        msg << "build_profile: negative dip " << u[i] << " at r=" << mesh.nodes[i]
            << " (lambda=" << spec.lambda << ")";
        throw SolverError(msg.str());
      }
      u[i] = 0.0;
    }
  }

  const double wiggle = 1e-11 * umax;
  for (std::size_t i = 0; i < imax; ++i)
    if (u[i + 1] < u[i] - wiggle)
      throw SolverError("build_profile: profile not unimodal left of the peak");
  for (std::size_t i = imax; i + 1 < n; ++i)
    if (u[i + 1] > u[i] + wiggle)
      throw SolverError("build_profile: profile not unimodal right of the peak");

  prof.u_max = umax;
  if (imax == 0 || imax + 1 == n) {
    prof.r_bar = mesh.nodes[imax];
  } else {
    const double num = u[imax - 1] - u[imax + 1];
    const double den = u[imax - 1] - 2.0 * u[imax] + u[imax + 1];
    double rb = mesh.nodes[imax];
    if (std::abs(den) > 1e-300) rb += 0.5 * h * num / den;
    prof.r_bar = std::clamp(rb, mesh.nodes[imax - 1], mesh.nodes[imax + 1]);
  }
  prof.s_slope = (4.0 * u[1] - u[2]) / (2.0 * h);
  prof.residual_inf = residual_inf_norm(spec, mesh, u);

  const double scale = std::max(1.0, std::pow(umax, spec.p - 1.0));
  const double floor = std::numeric_limits<double>::epsilon() * umax / (h * h);
  const double bound = std::max(1e-8 * scale, 256.0 * floor);
  if (prof.residual_inf > bound) {
    std::ostringstream msg;
    msg << "build_profile: residual " << prof.residual_inf << " exceeds bound " << bound;
    throw SolverError(msg.str());
  }

  prof.mesh = std::move(mesh);
  prof.u = std::move(u);
  return prof;
}

}  // namespace detail

inline Profile continue_in_lambda(const Profile& from, double lambda_target);

// Unique positive profile at the given parameters. Shooting seeds a damped Newton
// solve for lambda <= 1e3; larger lambda is reached by continuation from 900.
inline Profile ground_state(const ProblemSpec& spec, std::optional<double> s_hint = {}) {
  spec.validate();
  if (spec.lambda > 1e3) {
    ProblemSpec base = spec;
    base.lambda = 900.0;
    return continue_in_lambda(ground_state(base), spec.lambda);
  }
  const double lam1 = first_dirichlet_eigenvalue(spec.N);
  if (spec.lambda <= -lam1) {
    std::ostringstream msg;
    msg << "ground_state: lambda=" << spec.lambda << " is at or below -lambda_1="
        << -lam1 << "; no positive solution exists";
    throw BracketError(msg.str());
  }

  // g(s) changes sign where the first zero of the shot crosses r=2; when the shot
  // stays positive the (positive) end value stands in, so the sign is still right.
  std::vector<std::pair<double, double>> seen;  // (s, first zero or 3 when none)
  auto g = [&](double s) {
    const ShotResult shot = shoot(spec, s);
    const double fz = shot.first_zero.value_or(3.0);
    auto it = std::lower_bound(seen.begin(), seen.end(), std::make_pair(s, 0.0));
    if (it != seen.begin() && std::prev(it)->second < fz - 1e-9) {
      std::ostringstream msg;
      msg << "ground_state: first zero not monotone in slope near s=" << s
          << " (lambda=" << spec.lambda << ", p=" << spec.p << ")";
      throw SolverError(msg.str());
    }
    if (it != seen.end() && it->second > fz + 1e-9)
      throw SolverError("ground_state: first zero not monotone in slope");
    seen.insert(it, {s, fz});
    return shot.first_zero ? *shot.first_zero - 2.0 : shot.end_value;
  };

  const double s_lo = 1e-8;
  const double g_lo = g(s_lo);
  if (g_lo <= 0.0)
    throw BracketError("ground_state: shot crosses zero at vanishing amplitude");
  double s_hi = s_hint.value_or(1.0);
  if (s_hi <= s_lo) s_hi = 1.0;
  double g_hi = g(s_hi);
  double lo = s_lo, f_lo_val = g_lo;
  while (g_hi > 0.0) {
    lo = s_hi;
    f_lo_val = g_hi;
    s_hi *= 4.0;
    if (s_hi > 1e12)
      throw BracketError("ground_state: no slope bracket below 1e12");
    g_hi = g(s_hi);
  }
  const double tol_s = 1e-10 * std::max(1.0, lo);
  const double s_star =
      numerics::find_root(g, numerics::RootBracket{lo, s_hi, f_lo_val, g_hi}, tol_s);

  const ShotResult final_shot = shoot(spec, s_star, true);
  Mesh mesh = numerics::uniform_mesh(numerics::bvp_node_count(spec.lambda));
  numerics::MonotoneCubic path(final_shot.path.r, final_shot.path.u);
  const std::size_t n = mesh.size();
  std::vector<double> seed(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) seed[i] = std::max(0.0, path(mesh.nodes[i]));
  const double seed_max = *std::max_element(seed.begin(), seed.end());
  if (!(seed_max > 0.0)) throw SolverError("ground_state: empty shooting seed");

  std::vector<double> u = detail::newton_solve(spec, mesh, std::move(seed));
  const double u_max = *std::max_element(u.begin(), u.end());
  if (u_max < 1e-6 * seed_max)
    throw SolverError("ground_state: Newton collapsed toward the trivial solution");
  return detail::build_profile(spec, std::move(mesh), std::move(u));
}

// Walks lambda from an existing profile to the target with warm-started Newton
// solves, halving the step on failure and growing it on success. Near -lambda_1
// the amplitude predictor rescales the seed by the local bifurcation power law.
inline Profile continue_in_lambda(const Profile& from, double lambda_target) {
  from.spec.validate();
  if (!std::isfinite(lambda_target))
    throw InvalidParameterError("continue_in_lambda: target must be finite");
  const double lam1 = first_dirichlet_eigenvalue(from.spec.N);
  if (lambda_target <= -lam1) {
    std::ostringstream msg;
    msg << "continue_in_lambda: target lambda=" << lambda_target
        << " is at or below -lambda_1=" << -lam1;
    throw BracketError(msg.str());
  }

  Profile cur = from;
  const double pm2 = cur.spec.p - 2.0;
  double dstep = 0.1 * (cur.spec.lambda + lam1 + 1.0);
  while (cur.spec.lambda != lambda_target) {
    const double dir = lambda_target > cur.spec.lambda ? 1.0 : -1.0;
    const double remaining = std::abs(lambda_target - cur.spec.lambda);
    const double dlam = std::min(dstep, remaining);
    const double lam_try = remaining <= dstep ? lambda_target : cur.spec.lambda + dir * dlam;

    ProblemSpec spec_try = cur.spec;
    spec_try.lambda = lam_try;
    try {
      Mesh mesh = numerics::uniform_mesh(numerics::bvp_node_count(lam_try));
      numerics::MonotoneCubic f(cur.mesh.nodes, cur.u);
      const std::size_t n = mesh.size();
      std::vector<double> seed(n, 0.0);
      double amp = 1.0;
      if (cur.spec.lambda + lam1 < 1.0)
        amp = std::pow((lam_try + lam1) / (cur.spec.lambda + lam1), 1.0 / pm2);
      for (std::size_t i = 1; i + 1 < n; ++i)
        seed[i] = amp * std::max(0.0, f(mesh.nodes[i]));
      const double seed_max = *std::max_element(seed.begin(), seed.end());
      if (!(seed_max > 0.0)) throw SolverError("continue_in_lambda: empty seed");

      std::vector<double> u = detail::newton_solve(spec_try, mesh, std::move(seed));
      const double u_max = *std::max_element(u.begin(), u.end());
      if (u_max < 1e-6 * seed_max)
        throw SolverError("continue_in_lambda: collapsed toward the trivial solution");
      cur = detail::build_profile(spec_try, std::move(mesh), std::move(u));
      dstep = std::min(2.0 * dstep, 0.6 * (cur.spec.lambda + lam1 + 1.0));
    } catch (const SolverError&) {
      dstep *= 0.5;
      if (dstep < 1e-12 * (std::abs(cur.spec.lambda) + lam1 + 1.0)) {
        std::ostringstream msg;
        msg << "continue_in_lambda: step underflow at lambda=" << cur.spec.lambda
            << " heading to " << lambda_target;
        throw SolverError(msg.str());
      }
    }
  }
  return cur;
}

}  // namespace annulus_nls::bvp
