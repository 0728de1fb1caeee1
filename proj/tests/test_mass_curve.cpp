#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/mesh.hpp"
#include "annulus_nls/radial_bvp.hpp"

using namespace annulus_nls;
using namespace annulus_nls::masscurve;

namespace {

bvp::Profile synthetic_profile(int N, std::vector<double> u) {
  bvp::Profile prof;
  prof.spec = ProblemSpec{N, 4.0, 0.0};
  prof.mesh = numerics::uniform_mesh(u.size());
  prof.u = std::move(u);
  return prof;
}

const MassCurve& supercritical_curve() {
  static const MassCurve curve = [] {
    const double lam1 = bvp::first_dirichlet_eigenvalue(2);
    return trace_curve(2, 8.0, -lam1 + 1e-3, 1e3, 24);
  }();
  return curve;
}

}  // namespace

TEST_CASE("mass reduces to closed-form integrals on synthetic profiles") {
  const double pi = std::numbers::pi;
  // u = 1: d = |S^{N-1}| * integral of r^{N-1}
  REQUIRE(mass(synthetic_profile(2, std::vector<double>(401, 1.0))) ==
          Catch::Approx(3.0 * pi).epsilon(1e-12));
  REQUIRE(mass(synthetic_profile(3, std::vector<double>(401, 1.0))) ==
          Catch::Approx(28.0 * pi / 3.0).epsilon(1e-12));

  // u = r on N=2: 2 pi * integral of r^3 = 15 pi / 2
  const numerics::Mesh mesh = numerics::uniform_mesh(401);
  std::vector<double> u(mesh.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = mesh[i];
  REQUIRE(mass(synthetic_profile(2, u)) == Catch::Approx(7.5 * pi).epsilon(1e-12));
}

TEST_CASE("frozen masses pin the solver against drift") {
  const double m50 = mass(bvp::ground_state(ProblemSpec{2, 4.0, 50.0}));
  const double m100 = mass(bvp::ground_state(ProblemSpec{2, 4.0, 100.0}));
  REQUIRE(m50 == Catch::Approx(227.6114).epsilon(1e-4));
  REQUIRE(m100 == Catch::Approx(304.29719).epsilon(1e-4));
}

TEST_CASE("adjoint slope matches the finite-difference cross-check") {
  for (const auto& [N, p, lam] : {std::tuple<int, double, double>{2, 4.0, 10.0},
                                  {2, 8.0, 50.0},
                                  {3, 3.0, 5.0}}) {
    const bvp::Profile prof = bvp::ground_state(ProblemSpec{N, p, lam});
    const MassSlope slope = mass_slope(prof);
    REQUIRE(!slope.warning);
    const double scale = std::max(std::abs(slope.value), std::abs(slope.fd_value));
    REQUIRE(std::abs(slope.value - slope.fd_value) <= 0.01 * scale + 1e-9);
  }
}

TEST_CASE("slope cross-check stays on the branch near the bifurcation point") {
  const double lam1 = bvp::first_dirichlet_eigenvalue(2);
  const bvp::Profile prof = bvp::ground_state(ProblemSpec{2, 4.0, -lam1 + 1e-3});
  const MassSlope slope = mass_slope(prof);  // naive step 1e-3 would cross -lambda_1
  REQUIRE(std::isfinite(slope.fd_value));
  REQUIRE(slope.value > 0.0);
}

TEST_CASE("curve grid is increasing, spans the window, and validates input") {
  const std::vector<double> grid = curve_grid(2, 0.5, 1000.0, 41);
  REQUIRE(grid.size() == 41);
  REQUIRE(grid.front() == 0.5);
  REQUIRE(grid.back() == 1000.0);
  for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i] > grid[i - 1]);

  // all-linear branch when the window stays below the split
  const std::vector<double> lin = curve_grid(2, -5.0, 0.5, 9);
  REQUIRE(lin.size() == 9);
  REQUIRE(lin[1] - lin[0] == Catch::Approx(lin[8] - lin[7]).epsilon(1e-12));

  REQUIRE_THROWS_AS(curve_grid(2, -20.0, 10.0, 20), InvalidParameterError);
  REQUIRE_THROWS_AS(curve_grid(2, 5.0, 5.0, 20), InvalidParameterError);
  REQUIRE_THROWS_AS(curve_grid(2, 0.5, 10.0, 4), InvalidParameterError);
}

TEST_CASE("the subcritical branch traces gap-free with increasing mass") {
  const MassCurve curve = trace_curve(2, 4.0, 1.0, 50.0, 12);
  REQUIRE(curve.points.size() == 12);
  REQUIRE(curve.gaps.empty());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const CurvePoint& pt = curve.points[i];
    REQUIRE(pt.mass > 0.0);
    REQUIRE(pt.mass_slope > 0.0);
    REQUIRE(!pt.slope_warning);
    REQUIRE(pt.r_bar > 1.0);
    REQUIRE(pt.r_bar < 2.0);
    if (i > 0) {
      REQUIRE(pt.lambda > curve.points[i - 1].lambda);
      REQUIRE(pt.mass > curve.points[i - 1].mass);
      REQUIRE(pt.u_max > curve.points[i - 1].u_max);
    }
  }
}

TEST_CASE("regime classification follows the (N, p) table") {
  const double lam1_2 = bvp::first_dirichlet_eigenvalue(2);
  const double lam1_3 = bvp::first_dirichlet_eigenvalue(3);

  SECTION("subcritical N=2 admits every mass") {
    const MassCurve curve = trace_curve(2, 4.0, -lam1_2 + 1e-3, 1e3, 8);
    const ExistenceReport rep = classify(curve);
    REQUIRE(rep.regime == Regime::AllMasses);
    REQUIRE(!rep.eta_low.has_value());
  }
  SECTION("N=3 admits every mass for any subcritical power") {
    const MassCurve curve = trace_curve(3, 4.0, -lam1_3 + 1e-3, 1e3, 8);
    REQUIRE(classify(curve).regime == Regime::AllMasses);
  }
  SECTION("the critical power p=6 has a bounded mass range") {
    const MassCurve curve = trace_curve(2, 6.0, -lam1_2 + 1e-3, 1e3, 10);
    const ExistenceReport rep = classify(curve);
    REQUIRE(rep.regime == Regime::CriticalBounded);
    REQUIRE(rep.eta_low.has_value());
    REQUIRE(rep.eta_high.has_value());
    // the threshold bracket must contain the planar soliton mass sqrt(3) pi^2
    const double limit = std::sqrt(3.0) * std::numbers::pi * std::numbers::pi;
    REQUIRE(*rep.eta_low >= 0.9 * limit);
    REQUIRE(*rep.eta_low <= *rep.eta_high);
    REQUIRE(*rep.eta_high < 30.0);
  }
  SECTION("classification demands a wide enough window") {
    const MassCurve narrow = trace_curve(2, 4.0, 1.0, 1e3, 12);
    REQUIRE_THROWS_AS(classify(narrow), InvalidParameterError);
    const MassCurve low = trace_curve(2, 4.0, -lam1_2 + 1e-3, 500.0, 12);
    REQUIRE_THROWS_AS(classify(low), InvalidParameterError);
  }
}

TEST_CASE("the supercritical fold is located and refined") {
  const ExistenceReport rep = classify(supercritical_curve());
  REQUIRE(rep.regime == Regime::SupercriticalFold);
  REQUIRE(rep.eta_low.has_value());
  REQUIRE(*rep.eta_low == *rep.eta_high);
  REQUIRE(*rep.eta_low > 10.9);
  REQUIRE(*rep.eta_low < 11.2);
  REQUIRE(rep.lambda_hat_low.has_value());
  REQUIRE(*rep.lambda_hat_low > 6.0);
  REQUIRE(*rep.lambda_hat_high < 9.0);
  REQUIRE(*rep.lambda_hat_high - *rep.lambda_hat_low <= 1e-5);
}

TEST_CASE("mass targets resolve to branch points at the stated tolerance") {
  const MassCurve& curve = supercritical_curve();
  const double eta2 = *classify(curve).eta_low;

  SECTION("below the fold: one stable and one unstable solution") {
    const double c = 0.5 * eta2;
    const std::vector<SolvedRoot> roots = solve_mass(curve, c);
    REQUIRE(roots.size() == 2);
    REQUIRE(roots[0].lambda == Catch::Approx(-8.8033799).margin(0.1));
    REQUIRE(roots[0].stability == Stability::stable);
    REQUIRE(roots[0].dmass > 0.0);
    REQUIRE(roots[1].lambda == Catch::Approx(385.5855).margin(5.0));
    REQUIRE(roots[1].stability == Stability::unstable);
    REQUIRE(roots[1].dmass < 0.0);
    for (const SolvedRoot& root : roots) {
      REQUIRE(std::abs(root.mass - c) <= 1e-8 * std::max(1.0, c));
      REQUIRE(root.profile.u_max > 0.0);
      REQUIRE(root.profile.spec.lambda == root.lambda);
    }
  }
  SECTION("above the fold: no solutions") {
    REQUIRE(solve_mass(curve, 1.5 * eta2).empty());
  }
}

TEST_CASE("a grid point that hits the target exactly is emitted once") {
  const MassCurve curve = trace_curve(2, 4.0, 1.0, 50.0, 12);
  const double c = curve.points[5].mass;
  const std::vector<SolvedRoot> roots = solve_mass(curve, c);
  REQUIRE(roots.size() == 1);
  REQUIRE(roots[0].lambda == curve.points[5].lambda);
  REQUIRE(roots[0].stability == Stability::stable);
}

TEST_CASE("mass solving validates its inputs") {
  const MassCurve curve = trace_curve(2, 4.0, 1.0, 50.0, 12);
  REQUIRE_THROWS_AS(solve_mass(curve, -1.0), InvalidParameterError);
  REQUIRE_THROWS_AS(solve_mass(curve, 0.0), InvalidParameterError);
  MassCurve empty;
  REQUIRE_THROWS_AS(solve_mass(empty, 1.0), InvalidParameterError);
  // a target far above the sampled range has no root on this window
  REQUIRE(solve_mass(curve, 1e6).empty());
}

TEST_CASE("stability labels follow the slope sign convention") {
  REQUIRE(to_string(Stability::stable) == "stable");
  REQUIRE(to_string(Stability::unstable) == "unstable");
  REQUIRE(to_string(Stability::marginal) == "marginal");
  REQUIRE(to_string(Regime::AllMasses) == "AllMasses");
  REQUIRE(to_string(Regime::CriticalBounded) == "CriticalBounded");
  REQUIRE(to_string(Regime::SupercriticalFold) == "SupercriticalFold");
}
