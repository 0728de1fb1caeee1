#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/mesh.hpp"
#include "annulus_nls/problem.hpp"
#include "annulus_nls/radial_bvp.hpp"
#include "annulus_nls/tridiag.hpp"

namespace annulus_nls::dynamics {

using bvp::Profile;
using numerics::Mesh;
using Complex = std::complex<double>;

struct FieldState {
  double t = 0.0;
  Mesh mesh;
  std::vector<Complex> phi;  // Dirichlet: endpoints exactly zero
};

enum class PerturbationMode { PeakBump, RandomSmooth, MassPreservingRescale };

inline std::string to_string(PerturbationMode m) {
  switch (m) {
    case PerturbationMode::PeakBump: return "peak-bump";
    case PerturbationMode::RandomSmooth: return "random-smooth";
    case PerturbationMode::MassPreservingRescale: return "mass-preserving-rescale";
  }
  return "unknown";
}

inline PerturbationMode parse_mode(const std::string& s) {
  if (s == "peak-bump") return PerturbationMode::PeakBump;
  if (s == "random-smooth") return PerturbationMode::RandomSmooth;
  if (s == "mass-preserving-rescale") return PerturbationMode::MassPreservingRescale;
  throw InvalidParameterError("unknown perturbation mode: " + s);
}

struct ExperimentSpec {
  ProblemSpec base;
  double epsilon = 1e-3;
  PerturbationMode mode = PerturbationMode::PeakBump;
  double T_final = 50.0;
  double dt = 1e-3;
  unsigned seed = 1;

  // epsilon = 0 is allowed for a bare (unperturbed) evolution; a verdict
  // experiment additionally requires epsilon > 0.
  void validate() const {
    base.validate();
    if (!(dt > 0.0)) throw InvalidParameterError("ExperimentSpec: dt must be > 0");
    if (!(T_final >= 10.0 * dt))
      throw InvalidParameterError("ExperimentSpec: T_final must be >= 10*dt");
    if (!(epsilon >= 0.0) || epsilon > 0.1)
      throw InvalidParameterError("ExperimentSpec: epsilon must lie in [0, 0.1]");
    const double lam = std::abs(base.lambda);
    if (lam > 0.0 && dt > 0.1 / lam * (1.0 + 1e-12))
      throw InvalidParameterError("ExperimentSpec: dt must not exceed 0.1/|lambda|");
  }
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> orbital_distance_series;
  std::vector<double> phase_series;
  std::optional<double> blow_up_time;
  bool aborted = false;  // inner iteration failed even after the one dt halving
  std::size_t steps_completed = 0;
  double dt_used = 0.0;
  double max_step_mass_change = 0.0;  // relative, worst single step
};

namespace detail {

// Weights making the finite-difference radial operator self-adjoint; they track
// r^{N-1} to O(h^2) but satisfy the summation-by-parts identity exactly.
inline std::vector<double> adapted_weights(int N, const Mesh& mesh) {
  if (!mesh.uniform_step)
    throw InvalidParameterError("adapted_weights: uniform mesh required");
  const std::size_t n = mesh.size();
  const double h = *mesh.uniform_step;
  const double drift = N - 1.0;
  std::vector<double> w(n);
  w[0] = std::pow(mesh.nodes[0], drift);
  w[1] = std::pow(mesh.nodes[1], drift);
  for (std::size_t i = 1; i + 2 < n; ++i) {
    const double c_i = 1.0 / (h * h) + drift / (2.0 * h * mesh.nodes[i]);
    const double a_next = 1.0 / (h * h) - drift / (2.0 * h * mesh.nodes[i + 1]);
    w[i + 1] = w[i] * c_i / a_next;
  }
  w[n - 1] = std::pow(mesh.nodes[n - 1], drift);
  return w;
}

}  // namespace detail

// Weighted H1 inner product C * integral (f' conj(g') + f conj(g)) r^{N-1} dr,
// with forward differences at midpoints and Simpson for the zero-order part.
inline Complex h1_inner(int N, const Mesh& mesh, const std::vector<Complex>& f,
                        const std::vector<Complex>& g) {
  const std::size_t n = mesh.size();
  if (f.size() != n || g.size() != n || !mesh.uniform_step)
    throw InvalidParameterError("h1_inner: size mismatch or non-uniform mesh");
  if ((n - 1) % 2 != 0)
    throw InvalidParameterError("h1_inner: mesh must have an even interval count");
  const double h = *mesh.uniform_step;
  const double drift = N - 1.0;

  Complex deriv = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rmid = 0.5 * (mesh.nodes[i] + mesh.nodes[i + 1]);
    deriv += (f[i + 1] - f[i]) * std::conj(g[i + 1] - g[i]) / h * std::pow(rmid, drift);
  }

  Complex mass = f[0] * std::conj(g[0]) * std::pow(mesh.nodes[0], drift) +
                 f[n - 1] * std::conj(g[n - 1]) * std::pow(mesh.nodes[n - 1], drift);
  for (std::size_t i = 1; i + 1 < n; ++i)
    mass += (i % 2 == 1 ? 4.0 : 2.0) * f[i] * std::conj(g[i]) *
            std::pow(mesh.nodes[i], drift);
  return sphere_measure(N) * (deriv + mass * (h / 3.0));
}

inline double h1_norm(int N, const Mesh& mesh, const std::vector<Complex>& f) {
  return std::sqrt(std::max(0.0, h1_inner(N, mesh, f, f).real()));
}

inline std::vector<Complex> to_complex(const std::vector<double>& u) {
  return std::vector<Complex>(u.begin(), u.end());
}

// Distance to the phase orbit of the reference: the infimum over e^{is} has the
// closed form delta^2 = |Phi|^2 + |u|^2 - 2|<Phi, u>|.
inline double orbital_distance(const FieldState& state, const Profile& reference) {
  if (state.mesh.size() != reference.mesh.size())
    throw InvalidParameterError("orbital_distance: mesh mismatch");
  const std::vector<Complex> u = to_complex(reference.u);
  const int N = reference.spec.N;
  const double a = h1_inner(N, state.mesh, state.phi, state.phi).real();
  const double b = h1_inner(N, state.mesh, u, u).real();
  const double cross = std::abs(h1_inner(N, state.mesh, state.phi, u));
  return std::sqrt(std::max(0.0, a + b - 2.0 * cross));
}

inline double phase_angle(const FieldState& state, const Profile& reference) {
  const std::vector<Complex> u = to_complex(reference.u);
  const Complex ip = h1_inner(reference.spec.N, state.mesh, state.phi, u);
  return std::arg(ip);
}

// Crank-Nicolson with the difference-quotient nonlinear average: the multiplier
// G = (F(|psi'|^2) - F(|psi|^2)) / (|psi'|^2 - |psi|^2), F(s) = (2/p) s^{p/2},
// conserves the discrete mass and energy exactly at the inner fixed point.
class ConservativeStepper {
 public:
  ConservativeStepper(int N, double p, const Mesh& mesh)
      : p_(p), mesh_(mesh), sphere_(sphere_measure(N)), w_(detail::adapted_weights(N, mesh)) {
    const std::size_t n = mesh_.size();
    if ((n - 1) % 2 != 0)
      throw InvalidParameterError("ConservativeStepper: even interval count required");
    h_ = *mesh_.uniform_step;  // adapted_weights already insisted on uniformity
    const double drift = N - 1.0;
    a_.resize(n);
    c_.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      a_[i] = -1.0 / (h_ * h_) + drift / (2.0 * h_ * mesh_.nodes[i]);
      c_[i] = -1.0 / (h_ * h_) - drift / (2.0 * h_ * mesh_.nodes[i]);
    }
    b_ = 2.0 / (h_ * h_);
  }

  const Mesh& mesh() const { return mesh_; }
  const std::vector<double>& weights() const { return w_; }

  double mass(const std::vector<Complex>& psi) const {
    double q = 0.0;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) q += w_[i] * std::norm(psi[i]);
    return sphere_ * h_ * q;
  }

  double energy(const std::vector<Complex>& psi) const {
    const std::size_t n = psi.size();
    double quad = 0.0, pot = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Complex a0 = a_[i] * psi[i - 1] + b_ * psi[i] + c_[i] * psi[i + 1];
      quad += w_[i] * (std::conj(psi[i]) * a0).real();
      pot += w_[i] * potential(std::norm(psi[i]));
    }
    return 0.5 * sphere_ * h_ * (quad - pot);
  }

  // One implicit step; false when the inner fixed point fails to converge.
  bool step(std::vector<Complex>& psi, double dt, int max_inner = 60) const {
    const std::size_t n = psi.size();
    const std::size_t m = n - 2;
    double amp = 0.0;
    for (const Complex& z : psi) amp = std::max(amp, std::abs(z));
    // repeated solves only reproduce themselves to roundoff times the system's
    // condition (~ dt/h^2), so the stopping tolerance needs that floor
    const double reproducibility =
        16.0 * std::numeric_limits<double>::epsilon() * (1.0 + 0.5 * dt * b_);
    const double tol = std::max(1e-13, reproducibility) * std::max(1.0, amp);

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::norm(psi[i]);

    std::vector<Complex> next(psi);
    std::vector<Complex> sub(m), diag(m), sup(m), rhs(m);
    const Complex idt = Complex(0.0, 1.0) / dt;

    for (int inner = 0; inner < max_inner; ++inner) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double G = multiplier(s[i], std::norm(next[i]));
        const std::size_t j = i - 1;
        sub[j] = -0.5 * a_[i];
        sup[j] = -0.5 * c_[i];
        diag[j] = idt - 0.5 * (b_ - G);
        rhs[j] = idt * psi[i] +
                 0.5 * (a_[i] * psi[i - 1] + b_ * psi[i] + c_[i] * psi[i + 1]) -
                 0.5 * G * psi[i];
      }
      const std::vector<Complex> sol = numerics::solve_tridiagonal<Complex>(sub, diag, sup, rhs);
      double change = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        change = std::max(change, std::abs(sol[j] - next[j + 1]));
      for (std::size_t j = 0; j < m; ++j) next[j + 1] = sol[j];
      if (change <= tol) {
        psi.swap(next);
        psi[0] = psi[n - 1] = 0.0;
        return true;
      }
    }
    return false;
  }

 private:
  double potential(double sq) const { return (2.0 / p_) * std::pow(sq, 0.5 * p_); }
  double multiplier(double s0, double s1) const {
    // divided difference of F(s) = (2/p) s^{p/2}, evaluated as
    // (2/p) m^{q-1} ((1+x)^q - (1-x)^q) / (2x) with m the midpoint and
    // x = (s1-s0)/(s1+s0). The expm1/log1p deviations carry opposite signs,
    // so the difference never cancels; a naive F(s1)-F(s0) rattles the inner
    // iteration at eps*F/|s1-s0| and stalls it below its tolerance.
    const double m = 0.5 * (s0 + s1);
    if (!(m > 0.0)) return 0.0;
    const double q = 0.5 * p_;
    if (s0 == s1) return std::pow(m, q - 1.0);
    const double x = (s1 - s0) / (s0 + s1);
    const double hi = std::expm1(q * std::log1p(x));
    const double lo = std::expm1(q * std::log1p(-x));
    return (2.0 / p_) * std::pow(m, q - 1.0) * (hi - lo) / (2.0 * x);
  }

  double p_;
  Mesh mesh_;
  double sphere_;
  std::vector<double> w_;
  std::vector<double> a_, c_;
  double h_ = 0.0;
  double b_ = 0.0;
};

// Step size keeping the phase resolved and the inner iteration contractive: the
// fixed-point rate is ~ dt*(p-1)*u_max^{p-2}/2, which 0.1/lambda alone ignores.
inline double default_dt(const ProblemSpec& spec, double u_max) {
  const double lipschitz = (spec.p - 1.0) * std::pow(std::max(u_max, 0.0), spec.p - 2.0);
  return std::min({1e-2, 0.1 / std::max(1.0, std::abs(spec.lambda)),
                   0.5 / (lipschitz + std::abs(spec.lambda) + 1.0)});
}

namespace detail {

inline std::vector<double> normalized_bump(const Profile& ref) {
  const std::size_t n = ref.mesh.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ref.mesh.nodes[i];
    const double arg = (r - ref.r_bar) / 0.15;
    g[i] = (r - numerics::kInnerRadius) * (numerics::kOuterRadius - r) *
           std::exp(-arg * arg);
  }
  const double norm = h1_norm(ref.spec.N, ref.mesh, to_complex(g));
  for (double& v : g) v /= norm;
  return g;
}

inline std::vector<double> normalized_random_smooth(const Profile& ref, unsigned seed) {
  const std::size_t n = ref.mesh.size();
  std::mt19937 rng(seed);
  std::vector<double> g(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    double a[5];
    for (double& v : a) v = 2.0 * (rng() / 4294967295.0) - 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = ref.mesh.nodes[i] - numerics::kInnerRadius;
      double sum = 0.0;
      for (int m = 1; m <= 5; ++m) sum += a[m - 1] * std::sin(m * std::numbers::pi * x);
      g[i] = sum;
    }
    const double norm = h1_norm(ref.spec.N, ref.mesh, to_complex(g));
    if (norm > 1e-8) {
      for (double& v : g) v /= norm;
      return g;
    }
  }
  throw SolverError("normalized_random_smooth: degenerate draws");
}

}  // namespace detail

// Initial data for a stability experiment: the reference plus an H1-normalized
// perturbation of size epsilon * |u|_H1 (exactly mass-preserving for the rescale
// mode, which bumps then scales back to the reference's discrete mass).
inline FieldState perturbed_state(const Profile& reference, const ExperimentSpec& ex) {
  ex.validate();
  FieldState state;
  state.t = 0.0;
  state.mesh = reference.mesh;
  state.phi = to_complex(reference.u);
  if (ex.epsilon == 0.0) return state;

  const double unorm = h1_norm(reference.spec.N, reference.mesh, state.phi);
  const std::vector<double> dir =
      ex.mode == PerturbationMode::RandomSmooth
          ? detail::normalized_random_smooth(reference, ex.seed)
          : detail::normalized_bump(reference);
  for (std::size_t i = 0; i < state.phi.size(); ++i)
    state.phi[i] += ex.epsilon * unorm * dir[i];
  state.phi.front() = state.phi.back() = 0.0;

  if (ex.mode == PerturbationMode::MassPreservingRescale) {
    ConservativeStepper stepper(reference.spec.N, reference.spec.p, reference.mesh);
    const double target = stepper.mass(to_complex(reference.u));
    const double actual = stepper.mass(state.phi);
    const double factor = std::sqrt(target / actual);
    for (Complex& z : state.phi) z *= factor;
  }
  return state;
}

namespace detail {

struct RunControl {
  double unstable_threshold = 0.0;  // 0 disables per-step detection
  bool detected = false;
};

inline EvolutionTrace run_evolution(const FieldState& initial, const ExperimentSpec& ex,
                                    const Profile& reference, RunControl& ctl) {
  ex.validate();
  if (initial.mesh.size() != reference.mesh.size() ||
      initial.mesh.nodes != reference.mesh.nodes)
    throw InvalidParameterError("evolve: initial mesh must match the reference mesh");
  if (initial.phi.size() != initial.mesh.size())
    throw InvalidParameterError("evolve: field size mismatch");

  const ConservativeStepper stepper(reference.spec.N, reference.spec.p, reference.mesh);
  std::vector<Complex> psi = initial.phi;
  psi.front() = psi.back() = 0.0;

  double amp0 = 0.0;
  for (const Complex& z : psi) amp0 = std::max(amp0, std::abs(z));
  const double blow_threshold = 1e8 * std::max(1.0, amp0);

  EvolutionTrace trace;
  double dt = ex.dt;
  bool halved = false;
  auto stride_for = [&](double step) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(ex.T_final / (1000.0 * step)));
  };
  std::size_t stride = stride_for(dt);

  double t = initial.t;
  double prev_mass = stepper.mass(psi);
  double prev_raw_phase = 0.0;
  double unwrapped = 0.0;
  bool first_sample = true;

  auto sample = [&]() {
    FieldState cur{t, reference.mesh, psi};
    const double raw = phase_angle(cur, reference);
    if (first_sample) {
      unwrapped = raw;
      first_sample = false;
    } else {
      double d = raw - prev_raw_phase;
      while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
      while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
      unwrapped += d;
    }
    prev_raw_phase = raw;
    trace.times.push_back(t);
    trace.mass_series.push_back(stepper.mass(psi));
    trace.energy_series.push_back(stepper.energy(psi));
    trace.orbital_distance_series.push_back(orbital_distance(cur, reference));
    trace.phase_series.push_back(unwrapped);
  };
  sample();

  std::size_t since_sample = 0;
  while (t < ex.T_final - 0.5 * dt) {
    if (!stepper.step(psi, dt)) {
      if (!halved) {
        halved = true;
        dt *= 0.5;
        stride = stride_for(dt);
        continue;  // retry the same state with the smaller step
      }
      trace.aborted = true;
      break;
    }
    t += dt;
    ++trace.steps_completed;
    ++since_sample;

    const double q = stepper.mass(psi);
    trace.max_step_mass_change =
        std::max(trace.max_step_mass_change, std::abs(q - prev_mass) / prev_mass);
    prev_mass = q;

    double amp = 0.0;
    for (const Complex& z : psi) amp = std::max(amp, std::abs(z));
    if (amp > blow_threshold) {
      trace.blow_up_time = t;
      ctl.detected = true;
      sample();
      break;
    }

    if (ctl.unstable_threshold > 0.0) {
      FieldState cur{t, reference.mesh, psi};
      if (orbital_distance(cur, reference) >= ctl.unstable_threshold) {
        ctl.detected = true;
        sample();
        break;
      }
    }

    if (since_sample >= stride || !(t < ex.T_final - 0.5 * dt)) {
      sample();
      since_sample = 0;
    }
  }
  if (since_sample > 0 && (trace.aborted || trace.times.back() < t)) sample();
  trace.dt_used = dt;
  return trace;
}

}  // namespace detail

inline EvolutionTrace evolve(const FieldState& initial, const ExperimentSpec& ex,
                             const Profile& reference) {
  detail::RunControl ctl;
  return detail::run_evolution(initial, ex, reference, ctl);
}

enum class Verdict { StableConsistent, InstabilityDetected, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::StableConsistent: return "stable-consistent";
    case Verdict::InstabilityDetected: return "instability-detected";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct ExperimentResult {
  Verdict verdict = Verdict::Inconclusive;
  EvolutionTrace trace;
  double delta0 = 0.0;
  double reference_norm = 0.0;
};

// Perturb, evolve, and grade: stable-consistent when the orbit distance never
// exceeds 10x its initial value; instability-detected when it reaches
// 0.1 |u|_H1 (checked every step) or the run blows up; inconclusive otherwise.
inline ExperimentResult stability_experiment(const ExperimentSpec& ex,
                                             const Profile& reference) {
  ex.validate();
  if (!(ex.epsilon > 0.0))
    throw InvalidParameterError("stability_experiment: epsilon must be > 0");

  const FieldState initial = perturbed_state(reference, ex);
  ExperimentResult result;
  result.reference_norm =
      h1_norm(reference.spec.N, reference.mesh, to_complex(reference.u));
  result.delta0 = orbital_distance(initial, reference);

  detail::RunControl ctl;
  ctl.unstable_threshold = 0.1 * result.reference_norm;
  result.trace = detail::run_evolution(initial, ex, reference, ctl);

  double max_delta = 0.0;
  for (double d : result.trace.orbital_distance_series) max_delta = std::max(max_delta, d);

  if (ctl.detected || max_delta >= ctl.unstable_threshold ||
      result.trace.blow_up_time) {
    result.verdict = Verdict::InstabilityDetected;
  } else if (!result.trace.aborted && max_delta <= 10.0 * result.delta0) {
    result.verdict = Verdict::StableConsistent;
  } else {
    result.verdict = Verdict::Inconclusive;
  }
  return result;
}

}  // namespace annulus_nls::dynamics
