#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/quadrature.hpp"
#include "annulus_nls/radial_bvp.hpp"
#include "annulus_nls/soliton.hpp"
#include "annulus_nls/tridiag.hpp"

namespace annulus_nls::masscurve {

using bvp::Profile;

// d(lambda) = C * integral of u^2 r^{N-1} over (1,2).
inline double mass(const Profile& prof) {
  std::vector<double> u2(prof.u.size());
  for (std::size_t i = 0; i < prof.u.size(); ++i) u2[i] = prof.u[i] * prof.u[i];
  return sphere_measure(prof.spec.N) * numerics::quad_weighted(prof.mesh, u2, prof.spec.N - 1);
}

struct MassSlope {
  double value = 0.0;     // adjoint method
  double fd_value = 0.0;  // central finite-difference cross-check
  bool warning = false;   // the two disagree beyond 1%
};

// d'(lambda) via the linearized problem L w = -u (tridiagonal, same matrix as the
// Newton Jacobian at the converged profile), d' = 2C * integral of u w r^{N-1}.
// Cross-checked against (d(l+h) - d(l-h)) / 2h with warm-started re-solves.
inline MassSlope mass_slope(const Profile& prof, bool cross_check = true) {
  const std::size_t n = prof.mesh.size();
  const double h = *prof.mesh.uniform_step;
  const double pm1 = prof.spec.p - 1.0, pm2 = prof.spec.p - 2.0;
  const double drift = prof.spec.N - 1.0;

  std::vector<double> sub(n - 2), diag(n - 2), sup(n - 2), rhs(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double r = prof.mesh.nodes[i];
    sub[i - 1] = -1.0 / (h * h) + drift / (2.0 * h * r);
    sup[i - 1] = -1.0 / (h * h) - drift / (2.0 * h * r);
    const double dnl = prof.u[i] > 0.0 ? pm1 * std::pow(prof.u[i], pm2) : 0.0;
    diag[i - 1] = 2.0 / (h * h) + prof.spec.lambda - dnl;
    rhs[i - 1] = -prof.u[i];
  }
  std::vector<double> w;
  try {
    w = numerics::solve_tridiagonal(sub, diag, sup, rhs);
  } catch (const SolverError& e) {
    std::ostringstream msg;
    msg << "mass_slope: singular linearization at lambda=" << prof.spec.lambda
        << " (the branch should be non-degenerate): " << e.what();
    throw SolverError(msg.str());
  }

  std::vector<double> uw(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) uw[i] = prof.u[i] * w[i - 1];
  MassSlope out;
  out.value = 2.0 * sphere_measure(prof.spec.N) *
              numerics::quad_weighted(prof.mesh, uw, prof.spec.N - 1);

  if (cross_check) {
    double dh = std::max(1e-3, 1e-3 * std::abs(prof.spec.lambda));
    // keep the downwind stencil point on the branch (above -lambda_1)
    const double room = prof.spec.lambda + bvp::first_dirichlet_eigenvalue(prof.spec.N);
    if (dh >= room) dh = 0.5 * room;
    const double dp = mass(bvp::continue_in_lambda(prof, prof.spec.lambda + dh));
    const double dm = mass(bvp::continue_in_lambda(prof, prof.spec.lambda - dh));
    out.fd_value = (dp - dm) / (2.0 * dh);
    const double scale = std::max({std::abs(out.value), std::abs(out.fd_value), 1e-12});
    out.warning = std::abs(out.value - out.fd_value) > 0.01 * scale + 1e-9;
  } else {
    out.fd_value = out.value;
  }
  return out;
}

struct CurvePoint {
  double lambda = 0.0;
  double mass = 0.0;
  double mass_slope = 0.0;
  double u_max = 0.0;
  double r_bar = 0.0;
  double s_slope = 0.0;
  bool slope_warning = false;
};

struct CurveGap {
  double lambda = 0.0;
  std::string reason;
};

struct MassCurve {
  int N = 2;
  double p = 4.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::vector<CurvePoint> points;
  std::vector<CurveGap> gaps;
};

// Sample grid: linear up to max(1, lambda_1), logarithmic above.
inline std::vector<double> curve_grid(int N, double lo, double hi, int n_points) {
  const double lam1 = bvp::first_dirichlet_eigenvalue(N);
  if (!(lo > -lam1)) throw InvalidParameterError("curve_grid: lambda_lo must exceed -lambda_1");
  if (!(hi > lo)) throw InvalidParameterError("curve_grid: need lambda_hi > lambda_lo");
  if (n_points < 8) throw InvalidParameterError("curve_grid: need n_points >= 8");

  const double split = std::max(1.0, lam1);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_points));
  if (hi <= split) {
    for (int i = 0; i < n_points; ++i)
      grid.push_back(lo + (hi - lo) * i / (n_points - 1.0));
  } else {
    const int n_lin = n_points / 2;
    const int n_log = n_points - n_lin;
    for (int i = 0; i < n_lin; ++i)
      grid.push_back(lo + (split - lo) * i / static_cast<double>(n_lin));
    for (int j = 0; j < n_log; ++j)
      grid.push_back(split * std::pow(hi / split, j / (n_log - 1.0)));
  }
  grid.back() = hi;
  return grid;
}

inline MassCurve trace_curve(int N, double p, double lambda_lo, double lambda_hi,
                             int n_points) {
  ProblemSpec base{N, p, lambda_lo};
  base.validate();
  const std::vector<double> grid = curve_grid(N, lambda_lo, lambda_hi, n_points);

  MassCurve curve;
  curve.N = N;
  curve.p = p;
  curve.lambda_min = lambda_lo;
  curve.lambda_max = lambda_hi;

  std::optional<Profile> last;
  for (double lam : grid) {
    ProblemSpec spec{N, p, lam};
    std::optional<Profile> prof;
    try {
      prof = last ? bvp::continue_in_lambda(*last, lam) : bvp::ground_state(spec);
    } catch (const SolverError&) {
      try {
        prof = bvp::ground_state(spec);
      } catch (const SolverError& e2) {
        curve.gaps.push_back({lam, e2.what()});
        continue;
      }
    }
    const MassSlope slope = mass_slope(*prof);
    CurvePoint pt;
    pt.lambda = lam;
    pt.mass = mass(*prof);
    pt.mass_slope = slope.value;
    pt.u_max = prof->u_max;
    pt.r_bar = prof->r_bar;
    pt.s_slope = prof->s_slope;
    pt.slope_warning = slope.warning;
    curve.points.push_back(pt);
    last = std::move(prof);
  }
  return curve;
}

enum class Regime { AllMasses, CriticalBounded, SupercriticalFold };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::AllMasses: return "AllMasses";
    case Regime::CriticalBounded: return "CriticalBounded";
    case Regime::SupercriticalFold: return "SupercriticalFold";
  }
  return "unknown";
}

enum class Stability { stable, unstable, marginal };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "unknown";
}

struct SolvedRoot {
  double lambda = 0.0;
  double mass = 0.0;
  double dmass = 0.0;
  Stability stability = Stability::marginal;
  Profile profile;
};

struct ExistenceReport {
  Regime regime = Regime::AllMasses;
  std::optional<double> eta_low;         // observed bound on the threshold
  std::optional<double> eta_high;        // upper end of the threshold bracket
  std::optional<double> lambda_hat_low;  // fold location bracket (supercritical)
  std::optional<double> lambda_hat_high;
  std::vector<SolvedRoot> solutions;
};

namespace detail {

// Warm profile provider for refinement: continues from the nearest solved profile.
class ProfileCache {
 public:
  ProfileCache(int N, double p) : N_(N), p_(p) {}
  const Profile& at(double lambda) {
    for (const auto& pr : store_)
      if (pr.spec.lambda == lambda) return pr;
    Profile prof = store_.empty() ? bvp::ground_state(ProblemSpec{N_, p_, lambda})
                                  : bvp::continue_in_lambda(nearest(lambda), lambda);
    store_.push_back(std::move(prof));
    return store_.back();
  }

 private:
  const Profile& nearest(double lambda) const {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < store_.size(); ++i) {
      const double d = std::abs(store_[i].spec.lambda - lambda);
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    return store_[best];
  }
  int N_;
  double p_;
  std::vector<Profile> store_;
};

}  // namespace detail

// Regime per (N, p) with threshold estimates read off the traced curve. The
// critical threshold is reported as an interval [observed max, analytic tail
// limit + gap], since a finite sweep only brackets sup d. The supercritical fold
// is refined by golden-section in lambda on the continuation.
inline ExistenceReport classify(const MassCurve& curve) {
  const double lam1 = bvp::first_dirichlet_eigenvalue(curve.N);
  if (curve.points.size() < 8)
    throw InvalidParameterError("classify: curve too short to classify");
  if (curve.lambda_min > -lam1 + 2e-3 || curve.lambda_max < 1e3)
    throw InvalidParameterError(
        "classify: curve must span [-lambda_1 + 1e-3, Lambda] with Lambda >= 1e3");

  ExistenceReport report;
  if (curve.N >= 3 || curve.p < 6.0) {
    report.regime = Regime::AllMasses;
    return report;
  }

  double obs_max = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    if (curve.points[i].mass > obs_max) {
      obs_max = curve.points[i].mass;
      arg = i;
    }

  if (curve.p == 6.0) {
    report.regime = Regime::CriticalBounded;
    const double tail_limit = sphere_measure(2) * asymptotics::soliton_moment(6.0, 0);
    const double uncertainty = std::abs(curve.points.back().mass - tail_limit);
    report.eta_low = obs_max;
    report.eta_high = std::max(obs_max, tail_limit) + uncertainty;
    return report;
  }

  report.regime = Regime::SupercriticalFold;
  if (arg == 0 || arg + 1 == curve.points.size())
    throw SolverError("classify: fold maximum not interior to the sampled range");

  detail::ProfileCache cache(curve.N, curve.p);
  double a = curve.points[arg - 1].lambda;
  double b = curve.points[arg + 1].lambda;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = mass(cache.at(x1)), f2 = mass(cache.at(x2));
  while (b - a > 1e-6 * std::max(1.0, std::abs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = mass(cache.at(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = mass(cache.at(x1));
    }
  }
  const double lam_hat = 0.5 * (a + b);
  const double eta2 = std::max({obs_max, f1, f2, mass(cache.at(lam_hat))});
  report.eta_low = eta2;
  report.eta_high = eta2;
  report.lambda_hat_low = a;
  report.lambda_hat_high = b;
  return report;
}

// All solutions of d(lambda) = c along the sampled branch: every sign change of
// d - c is bisected with BVP re-solves until |d - c| <= 1e-8 max(1, c). Roots
// closer than 1e-6 in lambda merge into one marginal root.
inline std::vector<SolvedRoot> solve_mass(const MassCurve& curve, double c,
                                          double tol_scale = 1e-8) {
  if (!(c > 0.0)) throw InvalidParameterError("solve_mass: target mass must be > 0");
  if (curve.points.size() < 2)
    throw InvalidParameterError("solve_mass: need at least two curve points");

  detail::ProfileCache cache(curve.N, curve.p);
  const double tol = tol_scale * std::max(1.0, c);
  std::vector<SolvedRoot> roots;

  auto emit = [&](double lambda, const Profile& prof) {
    SolvedRoot root;
    root.lambda = lambda;
    root.profile = prof;
    root.mass = mass(prof);
    const MassSlope slope = mass_slope(prof);
    root.dmass = slope.value;
    if (std::abs(root.dmass) <= 1e-6 * root.mass)
      root.stability = Stability::marginal;
    else
      root.stability = root.dmass > 0.0 ? Stability::stable : Stability::unstable;
    roots.push_back(std::move(root));
  };

  for (const CurvePoint& pt : curve.points)
    if (pt.mass == c) emit(pt.lambda, cache.at(pt.lambda));

  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const CurvePoint& l = curve.points[i];
    const CurvePoint& r = curve.points[i + 1];
    const double fl = l.mass - c, fr = r.mass - c;
    if (!(fl * fr < 0.0)) continue;  // exact grid hits were emitted above

    double a = l.lambda, b = r.lambda, fa = fl;
    double lam_root = 0.5 * (a + b);
    std::optional<Profile> prof_root;  // cache storage reallocates, so keep a copy
    for (int iter = 0; iter < 200; ++iter) {
      lam_root = 0.5 * (a + b);
      prof_root = cache.at(lam_root);
      const double fm = mass(*prof_root) - c;
      if (std::abs(fm) <= tol || (b - a) <= 1e-13 * std::max(1.0, std::abs(lam_root)))
        break;
      if ((fa < 0.0) == (fm < 0.0)) {
        a = lam_root;
        fa = fm;
      } else {
        b = lam_root;
      }
    }
    if (prof_root) emit(lam_root, *prof_root);
  }

  std::sort(roots.begin(), roots.end(),
            [](const SolvedRoot& x, const SolvedRoot& y) { return x.lambda < y.lambda; });
  std::vector<SolvedRoot> merged;
  for (auto& root : roots) {
    if (!merged.empty() && std::abs(root.lambda - merged.back().lambda) < 1e-6) {
      merged.back().stability = Stability::marginal;
      continue;
    }
    merged.push_back(std::move(root));
  }
  return merged;
}

}  // namespace annulus_nls::masscurve
