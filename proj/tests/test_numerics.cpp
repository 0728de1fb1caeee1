#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/interpolate.hpp"
#include "annulus_nls/mesh.hpp"
#include "annulus_nls/ode.hpp"
#include "annulus_nls/powerlaw.hpp"
#include "annulus_nls/quadrature.hpp"
#include "annulus_nls/rootfind.hpp"
#include "annulus_nls/tridiag.hpp"

using namespace annulus_nls;
using namespace annulus_nls::numerics;

namespace {

// dense Gaussian elimination with partial pivoting, used only as an oracle here
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("tridiagonal solve matches a dense elimination oracle") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 14;
    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      sub[i] = unit(rng);
      sup[i] = unit(rng);
      rhs[i] = unit(rng);
      diag[i] = 3.0 + unit(rng);  // diagonally dominant, so the pivots stay healthy
    }
    sub[0] = sup[n - 1] = 0.0;

    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      dense[i][i] = diag[i];
      if (i > 0) dense[i][i - 1] = sub[i];
      if (i + 1 < n) dense[i][i + 1] = sup[i];
    }
    const auto x = solve_tridiagonal(sub, diag, sup, rhs);
    const auto y = dense_solve(dense, rhs);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(x[i] == Catch::Approx(y[i]).margin(1e-12));
  }
}

TEST_CASE("tridiagonal solve handles complex bands and rejects singular systems") {
  using C = std::complex<double>;
  std::vector<C> sub{C(0, 0), C(0.3, -0.2), C(-0.1, 0.4)};
  std::vector<C> diag{C(2, 1), C(-3, 0.5), C(1.5, -2)};
  std::vector<C> sup{C(0.2, 0.7), C(-0.4, 0.1), C(0, 0)};
  std::vector<C> rhs{C(1, 0), C(0, 1), C(-1, 2)};
  const auto x = solve_tridiagonal<C>(sub, diag, sup, rhs);
  // residual check by hand
  for (std::size_t i = 0; i < 3; ++i) {
    C r = diag[i] * x[i] - rhs[i];
    if (i > 0) r += sub[i] * x[i - 1];
    if (i < 2) r += sup[i] * x[i + 1];
    REQUIRE(std::abs(r) < 1e-12);
  }

  std::vector<double> zsub{0, 0}, zdiag{0, 1}, zsup{0, 0}, zrhs{1, 1};
  REQUIRE_THROWS_AS(solve_tridiagonal(zsub, zdiag, zsup, zrhs), SolverError);
}

TEST_CASE("uniform mesh and node-count policy") {
  const Mesh m = uniform_mesh(101);
  REQUIRE(m.size() == 101);
  REQUIRE(m[0] == 1.0);
  REQUIRE(m[100] == 2.0);
  REQUIRE(m.uniform_step.has_value());
  REQUIRE(*m.uniform_step == Catch::Approx(0.01).epsilon(1e-14));
  REQUIRE_THROWS_AS(uniform_mesh(8), InvalidParameterError);

  REQUIRE(bvp_node_count(10.0) == 401);
  REQUIRE(bvp_node_count(50.0) == 401);
  REQUIRE(bvp_node_count(387.7) == 801);
  REQUIRE(bvp_node_count(4000.0) == 2561);
  for (double lam : {-9.0, 1.0, 123.0, 5e4, 1e8}) REQUIRE(bvp_node_count(lam) % 2 == 1);
}

TEST_CASE("weighted quadrature reproduces monomial integrals") {
  const Mesh m = uniform_mesh(401);
  std::vector<double> ones(m.size(), 1.0);

  // int_1^2 r dr = 3/2 and int_1^2 r^2 dr = 7/3; Simpson is exact for cubics
  REQUIRE(quad_weighted(m, ones, 1) == Catch::Approx(1.5).epsilon(1e-14));
  REQUIRE(quad_weighted(m, ones, 2) == Catch::Approx(7.0 / 3.0).epsilon(1e-14));

  // int_1^2 sin(pi(r-1)) r dr = 3/pi
  std::vector<double> s(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) s[i] = std::sin(std::numbers::pi * (m[i] - 1.0));
  REQUIRE(quad_weighted(m, s, 1) == Catch::Approx(3.0 / std::numbers::pi).margin(1e-9));
}

TEST_CASE("weighted quadrature converges at fourth order") {
  auto err_at = [](std::size_t n) {
    const Mesh m = uniform_mesh(n);
    std::vector<double> f(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) f[i] = std::exp(m[i]);
    const double exact = 2.0 * std::exp(2.0) - std::exp(1.0);  // int_1^2 r^2 e^r dr
    return std::abs(quad_weighted(m, f, 2) - exact);
  };
  const double coarse = err_at(33), fine = err_at(65);
  REQUIRE(coarse / fine > 12.0);
}

TEST_CASE("weighted quadrature survives an odd interval count") {
  const Mesh m = uniform_mesh(18);  // 17 intervals
  std::vector<double> f(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) f[i] = std::sin(std::numbers::pi * (m[i] - 1.0));
  REQUIRE(quad_weighted(m, f, 1) == Catch::Approx(3.0 / std::numbers::pi).margin(1e-6));
}

TEST_CASE("adaptive Simpson hits tight tolerances") {
  const double s = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi,
                                    1e-14);
  REQUIRE(s == Catch::Approx(2.0).margin(1e-12));
  const double t = adaptive_simpson([](double x) { return 1.0 / std::cosh(x) / std::cosh(x); },
                                    0.0, 40.0, 1e-14);
  REQUIRE(t == Catch::Approx(std::tanh(40.0)).margin(1e-12));
}

TEST_CASE("monotone cubic interpolation") {
  SECTION("nodes and linear data are reproduced exactly") {
    std::vector<double> x{0.0, 0.5, 1.25, 2.0}, y;
    for (double v : x) y.push_back(3.0 * v - 1.0);
    const MonotoneCubic f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(f(x[i]) == Catch::Approx(y[i]).margin(0));
    REQUIRE(f(0.9) == Catch::Approx(3.0 * 0.9 - 1.0).margin(1e-14));
  }

  SECTION("monotone data stays monotone between nodes") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> step(0.01, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> x{0.0}, y{0.0};
      for (int i = 0; i < 12; ++i) {
        x.push_back(x.back() + step(rng));
        y.push_back(y.back() + step(rng));
      }
      const MonotoneCubic f(x, y);
      double prev = f(x.front());
      for (double t = x.front(); t <= x.back(); t += (x.back() - x.front()) / 500.0) {
        const double v = f(t);
        REQUIRE(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  SECTION("evaluation clamps outside the node range") {
    const MonotoneCubic f({0.0, 1.0}, {2.0, 5.0});
    REQUIRE(f(-3.0) == 2.0);
    REQUIRE(f(9.0) == 5.0);
  }
}

TEST_CASE("power-law fit recovers exact and noisy exponents") {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(0.5 * i);
    y.push_back(3.7 * std::pow(0.5 * i, 2.5));
  }
  const auto fit = fit_powerlaw(x, y);
  REQUIRE(fit.exponent == Catch::Approx(2.5).margin(1e-12));
  REQUIRE(fit.amplitude == Catch::Approx(3.7).margin(1e-10));
  REQUIRE(fit.rms_log_residual < 1e-13);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<double> yn;
  for (std::size_t i = 0; i < x.size(); ++i) yn.push_back(y[i] * std::exp(noise(rng)));
  const auto noisy = fit_powerlaw(x, yn);
  REQUIRE(noisy.exponent == Catch::Approx(2.5).margin(0.05));

  REQUIRE_THROWS_AS(fit_powerlaw(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
                    InvalidParameterError);
  REQUIRE_THROWS_AS(fit_powerlaw(std::vector<double>{1.0, 2.0, 3.0},
                                 std::vector<double>{1.0, -2.0, 3.0}),
                    InvalidParameterError);
}

TEST_CASE("line fit recovers slope and intercept") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0}, y;
  for (double v : x) y.push_back(-0.75 * v + 2.25);
  const auto fit = fit_line(x, y);
  REQUIRE(fit.slope == Catch::Approx(-0.75).margin(1e-13));
  REQUIRE(fit.intercept == Catch::Approx(2.25).margin(1e-13));
}

TEST_CASE("bracketed root finding") {
  SECTION("cosine root") {
    RootBracket br{0.0, 2.0, std::cos(0.0), std::cos(2.0)};
    const double r = find_root([](double x) { return std::cos(x); }, br, 1e-13);
    REQUIRE(r == Catch::Approx(std::numbers::pi / 2.0).margin(1e-12));
  }

  SECTION("random cubics with a known root") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
      const double root = pick(rng);
      auto f = [&](double x) { return (x - root) * (1.0 + (x - root) * (x - root)); };
      RootBracket br{root - 1.5, root + 2.5, f(root - 1.5), f(root + 2.5)};
      const double r = find_root(f, br, 1e-12);
      REQUIRE(r == Catch::Approx(root).margin(1e-10));
      REQUIRE(r >= br.lo - 1e-15);
      REQUIRE(r <= br.hi + 1e-15);
    }
  }

  SECTION("invalid brackets are rejected") {
    RootBracket same_sign{0.0, 1.0, 1.0, 2.0};
    REQUIRE_THROWS_AS(find_root([](double x) { return x; }, same_sign, 1e-10), BracketError);
  }
}

TEST_CASE("radial IVP reproduces closed-form solutions") {
  SECTION("N=2 harmonic: u = ln r") {
    const auto res = integrate_radial_ivp(2, [](double) { return 0.0; }, 1.0, 0.0, 1.0, 2.0,
                                          1e-12, false);
    REQUIRE(res.u.back() == Catch::Approx(std::log(2.0)).margin(1e-10));
    REQUIRE(res.du.back() == Catch::Approx(0.5).margin(1e-10));
    REQUIRE(!res.first_zero.has_value());
    REQUIRE(!res.overflowed);
  }

  SECTION("N=3 linear reaction: u = sin(pi(r-1))/r vanishes at r=2") {
    const double pi = std::numbers::pi;
    const auto res = integrate_radial_ivp(3, [&](double u) { return -pi * pi * u; }, 1.0, 0.0,
                                          pi, 3.0, 1e-12, true);
    REQUIRE(res.first_zero.has_value());
    REQUIRE(*res.first_zero == Catch::Approx(2.0).margin(1e-9));
  }

  SECTION("tolerance scaling") {
    auto err_at = [](double tol) {
      const auto res = integrate_radial_ivp(2, [](double) { return 0.0; }, 1.0, 0.0, 1.0, 2.0,
                                            tol, false);
      return std::abs(res.u.back() - std::log(2.0));
    };
    REQUIRE(err_at(1e-6) < 1e-3);
    REQUIRE(err_at(1e-12) < 1e-9);
    REQUIRE(err_at(1e-12) <= err_at(1e-4) + 1e-15);
  }

  SECTION("exponential growth is flagged, not thrown") {
    const auto res = integrate_radial_ivp(2, [](double u) { return 100.0 * u; }, 1.0, 1.0, 10.0,
                                          40.0, 1e-10, false);
    REQUIRE(res.overflowed);
    REQUIRE(res.r.back() < 40.0);
  }

  SECTION("finite-time blowup runs the step size into the ground") {
    REQUIRE_THROWS_AS(integrate_radial_ivp(2, [](double u) { return u * u * u; }, 1.0, 1.0,
                                           50.0, 50.0, 1e-10, false),
                      StepUnderflowError);
  }
}
