#pragma once

#include <cmath>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/interpolate.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/powerlaw.hpp"
#include "annulus_nls/quadrature.hpp"
#include "annulus_nls/radial_bvp.hpp"
#include "annulus_nls/soliton.hpp"

namespace annulus_nls::asymptotics {

using bvp::Profile;

// Blow-up rescaling omega(r) = lambda^{1/(2-p)} u(r/sqrt(lambda) + r_bar), zooming
// into the peak at scale 1/sqrt(lambda). Zero outside the image of the annulus.
class Rescaled {
 public:
  explicit Rescaled(const Profile& prof)
      : interp_(prof.mesh.nodes, prof.u),
        lambda_(prof.spec.lambda),
        sqrt_lambda_(std::sqrt(prof.spec.lambda)),
        scale_(std::pow(prof.spec.lambda, 1.0 / (2.0 - prof.spec.p))),
        r_bar_(prof.r_bar),
        peak_(0.0) {
    if (!(prof.spec.lambda > 0.0))
      throw InvalidParameterError("Rescaled: requires lambda > 0");
    peak_ = scale_ * prof.u_max;
  }

  // r here is the zoomed coordinate; r = 0 is pinned to the profile maximum.
  double operator()(double r) const {
    if (r == 0.0) return peak_;
    const double rho = r / sqrt_lambda_ + r_bar_;
    if (rho <= numerics::kInnerRadius || rho >= numerics::kOuterRadius) return 0.0;
    return scale_ * interp_(rho);
  }

  double lambda() const { return lambda_; }
  double r_bar() const { return r_bar_; }
  double domain_lo() const { return sqrt_lambda_ * (numerics::kInnerRadius - r_bar_); }
  double domain_hi() const { return sqrt_lambda_ * (numerics::kOuterRadius - r_bar_); }

 private:
  numerics::MonotoneCubic interp_;
  double lambda_, sqrt_lambda_, scale_, r_bar_, peak_;
};

inline Rescaled rescale(const Profile& prof) { return Rescaled(prof); }

// sup |omega - W| over |r| <= window, sampled on a 4001-point uniform grid.
inline double sup_error(const Rescaled& omega, double p, double window = 5.0,
                        int samples = 4001) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = -window + 2.0 * window * i / (samples - 1.0);
    worst = std::max(worst, std::abs(omega(r) - soliton_eval(p, r)));
  }
  return worst;
}

// Integral of omega^2 r^k over the rescaled domain, by change of variables back
// to the profile grid: lambda^{2/(2-p) + (k+1)/2} * integral of u^2 (r - r_bar)^k.
inline double rescaled_moment(const Profile& prof, int k) {
  if (!(prof.spec.lambda > 0.0))
    throw InvalidParameterError("rescaled_moment: requires lambda > 0");
  if (k < 0) throw InvalidParameterError("rescaled_moment: k must be >= 0");
  std::vector<double> vals(prof.u.size());
  for (std::size_t i = 0; i < prof.u.size(); ++i) {
    double shift = 1.0;
    for (int j = 0; j < k; ++j) shift *= prof.mesh.nodes[i] - prof.r_bar;
    vals[i] = prof.u[i] * prof.u[i] * shift;
  }
  const double raw = numerics::quad_weighted(prof.mesh, vals, 0);
  const double expo = 2.0 / (2.0 - prof.spec.p) + 0.5 * (k + 1.0);
  return std::pow(prof.spec.lambda, expo) * raw;
}

struct RescaleReport {
  std::vector<double> lambdas;
  std::vector<double> sup_errors;        // sup |omega - W| on |r| <= 5
  std::vector<double> amplitude_ratios;  // lambda / u_max^{p-2}
  std::vector<double> r_bars;
  std::vector<double> moment_errors;     // k = 0..N-1, at the largest lambda
  double fitted_mass_exponent = 0.0;
};

// Quantitative blow-up diagnostics along an increasing lambda ladder.
inline RescaleReport limit_diagnostics(const std::vector<Profile>& profiles) {
  if (profiles.size() < 3)
    throw InvalidParameterError("limit_diagnostics: need at least 3 profiles");
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (!(profiles[i].spec.lambda > 0.0))
      throw InvalidParameterError("limit_diagnostics: lambdas must be positive");
    if (i > 0 && !(profiles[i].spec.lambda > profiles[i - 1].spec.lambda))
      throw InvalidParameterError("limit_diagnostics: lambdas must be increasing");
  }
  if (!(profiles.back().spec.lambda >= 1e3))
    throw InvalidParameterError("limit_diagnostics: largest lambda must reach 1e3");

  RescaleReport report;
  const double p = profiles.front().spec.p;
  std::vector<double> masses;
  for (const Profile& prof : profiles) {
    report.lambdas.push_back(prof.spec.lambda);
    report.sup_errors.push_back(sup_error(Rescaled(prof), p));
    report.amplitude_ratios.push_back(prof.spec.lambda /
                                      std::pow(prof.u_max, prof.spec.p - 2.0));
    report.r_bars.push_back(prof.r_bar);
    masses.push_back(masscurve::mass(prof));
  }

  const Profile& top = profiles.back();
  for (int k = 0; k < top.spec.N; ++k)
    report.moment_errors.push_back(
        std::abs(rescaled_moment(top, k) - soliton_moment(p, k)));

  // fit the tail: lambda >= 500 when enough samples are there, otherwise all
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < profiles.size(); ++i)
    if (report.lambdas[i] >= 500.0) {
      fx.push_back(report.lambdas[i]);
      fy.push_back(masses[i]);
    }
  if (fx.size() < 3) {
    fx = report.lambdas;
    fy = masses;
  }
  report.fitted_mass_exponent = numerics::fit_powerlaw(fx, fy).exponent;
  return report;
}

// Large-lambda mass prediction with soliton moments in place of the rescaled
// ones: C sum_k binom(N-1,k) lambda^{2/(p-2)-(k+1)/2} r_bar^{N-1-k} M_k.
inline double predict_mass(double p, int N, double lambda, double r_bar) {
  if (!(p > 2.0)) throw InvalidParameterError("predict_mass: p must be > 2");
  if (N < 2) throw InvalidParameterError("predict_mass: N must be >= 2");
  if (!(lambda > 0.0)) throw InvalidParameterError("predict_mass: lambda must be > 0");
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= N - 1; ++k) {
    if (k > 0) binom = binom * (N - k) / k;  // binom(N-1, k) updated incrementally
    const double expo = 2.0 / (p - 2.0) - 0.5 * (k + 1.0);
    sum += binom * std::pow(lambda, expo) * numerics::int_pow(r_bar, N - 1 - k) *
           soliton_moment(p, k);
  }
  return sphere_measure(N) * sum;
}

}  // namespace annulus_nls::asymptotics
