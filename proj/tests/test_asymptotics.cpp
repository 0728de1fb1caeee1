#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "annulus_nls/asymptotics.hpp"
#include "annulus_nls/errors.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/radial_bvp.hpp"

using namespace annulus_nls;
using namespace annulus_nls::asymptotics;

namespace {

const std::vector<bvp::Profile>& quarter_ladder() {
  static const std::vector<bvp::Profile> ladder = [] {
    std::vector<bvp::Profile> out;
    for (double lam : {62.5, 250.0, 1000.0, 4000.0})
      out.push_back(bvp::ground_state(ProblemSpec{2, 4.0, lam}));
    return out;
  }();
  return ladder;
}

}  // namespace

TEST_CASE("the line soliton matches its closed form") {
  REQUIRE(soliton_peak(4.0) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(soliton_peak(6.0) == Catch::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  for (double p : {3.0, 4.0, 6.0, 8.0}) {
    REQUIRE(soliton_eval(p, 0.0) == Catch::Approx(soliton_peak(p)).epsilon(1e-14));
    REQUIRE(soliton_eval(p, 1.3) == Catch::Approx(soliton_eval(p, -1.3)).epsilon(1e-14));
    REQUIRE(soliton_eval(p, 30.0) < 1e-8);
  }
  REQUIRE_THROWS_AS(soliton_eval(2.0, 0.0), InvalidParameterError);
}

TEST_CASE("the soliton satisfies its equation to discretization accuracy") {
  for (double p : {3.0, 4.0, 6.0, 8.0})
    REQUIRE(soliton_ode_residual(p) < 1e-8);
  // the stencil is fourth order: quadrupling h grows the residual ~256x once
  // truncation dominates roundoff, so compare two coarse steps
  const double fine = soliton_ode_residual(4.0, -5.0, 5.0, 1e-2);
  const double coarse = soliton_ode_residual(4.0, -5.0, 5.0, 4e-2);
  REQUIRE(coarse / fine == Catch::Approx(256.0).epsilon(0.25));
}

TEST_CASE("soliton moments reproduce exact integrals") {
  const double pi = std::numbers::pi;
  REQUIRE(soliton_moment(4.0, 0) == Catch::Approx(4.0).epsilon(1e-12));
  REQUIRE(soliton_moment(4.0, 2) == Catch::Approx(pi * pi / 3.0).epsilon(1e-12));
  REQUIRE(soliton_moment(6.0, 0) == Catch::Approx(std::sqrt(3.0) * pi / 2.0).epsilon(1e-12));
  REQUIRE(soliton_moment(4.0, 1) == 0.0);
  REQUIRE(soliton_moment(8.0, 3) == 0.0);
  REQUIRE_THROWS_AS(soliton_moment(4.0, -1), InvalidParameterError);
}

TEST_CASE("rescaling pins the peak and vanishes outside the mapped annulus") {
  const bvp::Profile prof = bvp::ground_state(ProblemSpec{2, 4.0, 100.0});
  const Rescaled omega = rescale(prof);
  REQUIRE(omega(0.0) == Catch::Approx(prof.u_max / 10.0).epsilon(1e-14));
  REQUIRE(omega.lambda() == 100.0);
  REQUIRE(omega.r_bar() == prof.r_bar);
  REQUIRE(omega.domain_lo() == Catch::Approx(10.0 * (1.0 - prof.r_bar)).epsilon(1e-14));
  REQUIRE(omega(omega.domain_lo() - 0.1) == 0.0);
  REQUIRE(omega(omega.domain_hi() + 0.1) == 0.0);
  // interior samples stay positive and below the peak
  REQUIRE(omega(1.0) > 0.0);
  REQUIRE(omega(1.0) < omega(0.0));

  bvp::Profile bad = prof;
  bad.spec.lambda = -1.0;
  REQUIRE_THROWS_AS(rescale(bad), InvalidParameterError);
}

TEST_CASE("rescaled profiles approach the soliton up the frozen ladder") {
  const auto& ladder = quarter_ladder();
  const std::vector<double> expected{0.287010, 0.205848, 0.146111, 0.103183};
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double err = sup_error(rescale(ladder[i]), 4.0);
    REQUIRE(err == Catch::Approx(expected[i]).margin(1e-3));
    if (i > 0)
      REQUIRE(err < sup_error(rescale(ladder[i - 1]), 4.0));
  }
}

TEST_CASE("limit diagnostics quantify the blow-up profile") {
  const RescaleReport rep = limit_diagnostics(quarter_ladder());
  REQUIRE(rep.lambdas.size() == 4);
  // lambda / u_max^{p-2} climbs toward 2/p = 0.5
  REQUIRE(rep.amplitude_ratios.back() == Catch::Approx(0.495066).margin(1e-3));
  for (std::size_t i = 1; i < rep.amplitude_ratios.size(); ++i)
    REQUIRE(rep.amplitude_ratios[i] > rep.amplitude_ratios[i - 1]);
  // the peak walks toward the inner boundary
  for (std::size_t i = 1; i < rep.r_bars.size(); ++i)
    REQUIRE(rep.r_bars[i] < rep.r_bars[i - 1]);
  REQUIRE(rep.r_bars.back() == Catch::Approx(1.052313).margin(1e-3));
  REQUIRE(rep.moment_errors.size() == 2);
  REQUIRE(rep.moment_errors[0] == Catch::Approx(0.037550).margin(2e-3));
  REQUIRE(rep.moment_errors[1] == Catch::Approx(0.099423).margin(2e-3));
  REQUIRE(rep.fitted_mass_exponent == Catch::Approx(0.455452).margin(0.02));
}

TEST_CASE("limit diagnostics reject unusable ladders") {
  const auto& ladder = quarter_ladder();
  REQUIRE_THROWS_AS(limit_diagnostics({ladder[0], ladder[1]}), InvalidParameterError);
  REQUIRE_THROWS_AS(limit_diagnostics({ladder[0], ladder[2], ladder[1]}),
                    InvalidParameterError);
  const bvp::Profile mid = bvp::ground_state(ProblemSpec{2, 4.0, 500.0});
  REQUIRE_THROWS_AS(limit_diagnostics({ladder[0], ladder[1], mid}),
                    InvalidParameterError);  // tops out below 1e3
}

TEST_CASE("the moment expansion predicts the computed mass at large lambda") {
  const auto& ladder = quarter_ladder();
  const bvp::Profile& mid = ladder[2];
  const bvp::Profile& top = ladder[3];
  const double pred_mid = predict_mass(4.0, 2, 1000.0, mid.r_bar);
  const double pred_top = predict_mass(4.0, 2, 4000.0, top.r_bar);
  REQUIRE(pred_mid == Catch::Approx(masscurve::mass(mid)).epsilon(0.05));
  REQUIRE(pred_top == Catch::Approx(masscurve::mass(top)).epsilon(0.05));
  // the relative gap shrinks as lambda grows
  const double gap_mid = std::abs(pred_mid / masscurve::mass(mid) - 1.0);
  const double gap_top = std::abs(pred_top / masscurve::mass(top) - 1.0);
  REQUIRE(gap_top < gap_mid);

  REQUIRE_THROWS_AS(predict_mass(2.0, 2, 100.0, 1.5), InvalidParameterError);
  REQUIRE_THROWS_AS(predict_mass(4.0, 1, 100.0, 1.5), InvalidParameterError);
  REQUIRE_THROWS_AS(predict_mass(4.0, 2, -1.0, 1.5), InvalidParameterError);
}
