#include <cmath>
#include <random>

#include "doctest.h"
#include "hardy/dirac.hpp"
#include "hardy/errors.hpp"

using namespace hardy;
using namespace hardy::dirac;
using numerics::RadialGrid;
using potentials::PotentialPair;
using potentials::RadialWeight;

namespace {

PotentialPair zero_pair() {
  PotentialPair p;
  p.c1 = 0.0;
  p.c2 = 0.0;
  return p;
}

PotentialPair coulomb_pair(double c1, double c2) {
  PotentialPair p;
  p.v1 = RadialWeight::coulomb(1.0);
  p.v2 = RadialWeight::coulomb(1.0);
  p.c1 = c1;
  p.c2 = c2;
  return p;
}

RadialGrid desk_grid(std::size_t n = 1000) { return RadialGrid::log_uniform(1e-6, 50.0, n); }

// r^p exp(-a r^q) with random p, a, q and a complex amplitude.
RadialProfile random_profile(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p = (k >= 0 ? k : -k - 1) + std::floor(2.0 * u(rng));
  const double a = 0.4 + 2.0 * u(rng);
  const Complex c = std::polar(0.5 + u(rng), 6.283185307179586 * u(rng));
  return u(rng) < 0.5 ? RadialProfile::exp(p, a, c) : RadialProfile::gauss(p, a, c);
}

// Weighted L2 distance on a fine log sample, sum |f - g|^2 r^3 dt.
double l2_distance(const RadialProfile& f, const std::function<Complex(double)>& g, double lo,
                   double hi) {
  const int n = 20000;
  const double dt = std::log(hi / lo) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = lo * std::exp((i + 0.5) * dt);
    sum += std::norm(f(r) - g(r)) * r * r * r * dt;
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("finite element space: vertices, dofs and polynomial reproduction") {
  const auto grid = RadialGrid::log_uniform(0.01, 10.0, 21);
  const std::vector<double> extra{1.0, 3.3};
  FeSpace space(grid, 3, extra);
  CHECK(space.dofs() == space.elements() * 3 + 1);
  CHECK(space.vertex_dof(1.0) % 3 == 0);
  CHECK(space.vertex_dof(3.3) % 3 == 0);
  CHECK_THROWS_AS(space.vertex_dof(2.0), InputError);

  // Interpolating t^3 - 2t in the degree-3 space is exact, derivatives included.
  std::vector<Complex> c(space.dofs());
  const auto ts = space.vertex_t();
  for (std::size_t e = 0; e < space.elements(); ++e) {
    for (int j = 0; j <= 3; ++j) {
      const double t = ts[e] + (ts[e + 1] - ts[e]) * j / 3.0;
      c[e * 3 + j] = t * t * t - 2.0 * t;
    }
  }
  FeFunction f(std::make_shared<const FeSpace>(space), c);
  for (double r : {0.02, 0.5, 1.0, 2.7, 9.0}) {
    const double t = std::log(r);
    const auto v = f.evaluate(r);
    CHECK(v[0].real() == doctest::Approx(t * t * t - 2.0 * t).epsilon(1e-12));
    CHECK(v[1].real() == doctest::Approx((3.0 * t * t - 2.0) / r).epsilon(1e-10));
    CHECK(v[2].real() == doctest::Approx((6.0 * t - (3.0 * t * t - 2.0)) / (r * r)).epsilon(1e-9));
  }
  CHECK(std::abs(f.evaluate(20.0)[0]) == 0.0);
  CHECK_THROWS_AS(FeSpace(grid, 0), InputError);
}

TEST_CASE("regime classification") {
  const auto grid = desk_grid(200);
  CHECK(DiracChannelProblem(zero_pair(), 0, 1.0, 0.0, grid).validate() == Regime::w1_nonpositive);
  CHECK(DiracChannelProblem(coulomb_pair(0.5, 0.5), 0, 1.0, 0.0, grid).validate() ==
        Regime::w1_nonnegative);
  PotentialPair shell;
  shell.v1_shells = {{1.0, 0.5}};
  shell.v2 = RadialWeight::coulomb(1.0);
  shell.c2 = 0.5;
  CHECK(DiracChannelProblem(shell, 0, 1.0, 0.0, grid).validate() == Regime::measure);
  CHECK_THROWS_AS(DiracChannelProblem(coulomb_pair(2.0, 2.0), 0, 1.0, 0.0, grid).validate(),
                  HypothesisError);
  CHECK_THROWS_AS(DiracChannelProblem(zero_pair(), 0, 1.0, 1.0, grid).validate(), InputError);
  CHECK(to_string(Regime::measure) == "measure");
  CHECK(default_lambda(zero_pair(), 2.0) == 1.0);
}

TEST_CASE("H inner product: closed-form values and conjugate symmetry") {
  const auto grid = desk_grid(200);
  DiracChannelProblem free(zero_pair(), 0, 1.0, 0.0, grid);
  const auto f = RadialProfile::exp(0, 1.0);
  // int e^{-2r} r^2 = 1/4, and |f'|^2 gives the same.
  CHECK(h_inner_product(f, f, free).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(h_inner_product(RadialProfile(), f, free)) == 0.0);

  std::mt19937_64 rng(7);
  DiracChannelProblem coulomb(coulomb_pair(0.5, 0.5), -2, 1.0, 0.3, grid);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_profile(rng, -2);
    const auto b = random_profile(rng, -2);
    const Complex ab = h_inner_product(a, b, coulomb);
    const Complex ba = h_inner_product(b, a, coulomb);
    CHECK(std::abs(ab - std::conj(ba)) <= 1e-12 * std::max(1.0, std::abs(ab)));
  }

  // Shells subtract c1 a R^2 f(R) conj(g(R)).
  PotentialPair shell;
  shell.v1_shells = {{1.5, 0.4}};
  shell.v2 = RadialWeight::coulomb(1.0);
  shell.c1 = 0.5;
  shell.c2 = 0.5;
  PotentialPair bare = shell;
  bare.v1_shells.clear();
  const auto g = RadialProfile::gauss(1, 0.5, Complex(0.0, 1.0));
  const Complex with = h_inner_product(f, g, DiracChannelProblem(shell, 0, 1.0, 0.2, grid));
  const Complex without = h_inner_product(f, g, DiracChannelProblem(bare, 0, 1.0, 0.2, grid));
  const Complex expected = without - 0.5 * 0.4 * 1.5 * 1.5 * f(1.5) * std::conj(g(1.5));
  CHECK(std::abs(with - expected) < 1e-12);

  // r^{-3/2} is not in H: the mass integral diverges logarithmically at 0.
  CHECK_THROWS_AS(h_inner_product(RadialProfile::power(-1.5), RadialProfile::power(-1.5), free),
                  HypothesisError);
}

TEST_CASE("norm equivalence probe") {
  const auto grid = desk_grid(200);
  std::mt19937_64 rng(11);
  std::vector<RadialProfile> gallery;
  for (int i = 0; i < 50; ++i) gallery.push_back(random_profile(rng, 0));

  // w1 = 0: the H-norm and the comparison norm coincide.
  DiracChannelProblem free(zero_pair(), 0, 1.0, 0.25, grid);
  const auto eq_free = norm_equivalence_probe(free, gallery);
  CHECK(eq_free.c_low == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eq_free.c_high == doctest::Approx(1.0).epsilon(1e-10));

  DiracChannelProblem coulomb(coulomb_pair(0.9, 0.9), 0, 1.0,
                              default_lambda(coulomb_pair(0.9, 0.9), 1.0), grid);
  const auto eq = norm_equivalence_probe(coulomb, gallery);
  CHECK(eq.regime_ok);
  CHECK(eq.c_low > 0.0);
  CHECK(eq.c_low <= eq.c_high);
  CHECK(std::isfinite(eq.c_high));
  CHECK_THROWS_AS(norm_equivalence_probe(coulomb, std::span<const RadialProfile>{}), InputError);
}

TEST_CASE("gradient term bound (H-norm controls sigma.grad phi)") {
  const auto grid = desk_grid(200);
  std::mt19937_64 rng(3);
  for (const auto& [pair, k] : {std::pair{zero_pair(), 0}, std::pair{coulomb_pair(0.0, 0.7), -2},
                                std::pair{coulomb_pair(0.9, 0.9), 0}}) {
    const double lambda = default_lambda(pair, 1.0);
    DiracChannelProblem problem(pair, k, 1.0, lambda, grid);
    std::vector<RadialProfile> gallery;
    for (int i = 0; i < 30; ++i) gallery.push_back(random_profile(rng, k));
    // c = 1 when w1 <= 0, otherwise the inverse lower equivalence constant.
    const double c = pair.c1 > 0.0 ? 1.0 / norm_equivalence_probe(problem, gallery).c_low : 1.0;
    for (const auto& phi : gallery) {
      double lhs = 0.0;
      const int n = 20000;
      const double lo = 1e-8, hi = 60.0, dt = std::log(hi / lo) / n;
      for (int i = 0; i < n; ++i) {
        const double r = lo * std::exp((i + 0.5) * dt);
        const double G = 1.0 + problem.w2(r) - lambda;
        lhs += std::norm(phi.derivative(r) - double(k) * phi(r) / r) / (G * G) * r * r * r * dt;
      }
      const double h2 = h_inner_product(phi, phi, problem).real();
      CHECK(lhs <= h2 * c / (1.0 - lambda) * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("apply_H on a closed-form pair") {
  const auto grid = desk_grid(200);
  DiracChannelProblem free(zero_pair(), 0, 1.0, 0.0, grid);
  const auto f = RadialProfile::exp(0, 1.0);
  const auto out = apply_H(free, f, RadialProfile());
  for (double r : {0.1, 1.0, 4.0}) {
    CHECK(out.upper(r).real() == doctest::Approx(std::exp(-r)).epsilon(1e-14));
    CHECK(out.lower(r).real() == doctest::Approx(std::exp(-r)).epsilon(1e-14));
  }
  const auto zero = apply_H(free, RadialProfile(), RadialProfile());
  CHECK(std::abs(zero.upper(1.0)) == 0.0);
  CHECK(std::abs(zero.lower(1.0)) == 0.0);

  // Lower component by finite differences against the closed form.
  DiracChannelProblem coulomb(coulomb_pair(0.5, 0.5), 1, 1.0, 0.2, grid);
  const auto phi = RadialProfile::gauss(1, 0.7);
  const auto chi = RadialProfile::exp(2, 1.1);
  const auto h = apply_H(coulomb, phi, chi);
  for (double r : {0.3, 1.2, 2.5}) {
    const double d = 1e-5;
    const Complex dchi = (chi(r + d) - chi(r - d)) / (2 * d);
    const Complex dphi = (phi(r + d) - phi(r - d)) / (2 * d);
    const Complex up = (1.0 - 0.5 / r + 0.2) * phi(r) + dchi + 3.0 * chi(r) / r;
    const Complex low = -(dphi - phi(r) / r) + (-1.0 - 0.5 / r + 0.2) * chi(r);
    CHECK(std::abs(h.upper(r) - up) < 1e-8);
    CHECK(std::abs(h.lower(r) - low) < 1e-8);
  }

  PotentialPair shell;
  shell.v1_shells = {{2.0, 0.3}};
  shell.c1 = 0.5;
  const auto charges = apply_H(DiracChannelProblem(shell, 0, 1.0, 0.0, grid), f, RadialProfile())
                           .shell_charges;
  REQUIRE(charges.size() == 1);
  CHECK(charges[0].charge.real() == doctest::Approx(0.5 * 0.3 * 4.0 * std::exp(-2.0)));
}

TEST_CASE("weak solve: zero data gives zero") {
  DiracChannelProblem problem(coulomb_pair(0.5, 0.5), 0, 1.0, 0.2, desk_grid(300));
  const auto r = weak_solve(problem, RadialProfile(), RadialProfile());
  for (double x : {1e-4, 0.5, 3.0}) {
    CHECK(std::abs(r.phi(x)) == 0.0);
    CHECK(std::abs(r.chi(x)) == 0.0);
  }
  CHECK(r.h_norm_phi == 0.0);
}

TEST_CASE("weak solve: manufactured solution") {
  // phi* = e^{-r^2}, chi* = 0 on k = 0, V = 0, m = 1, lambda = 0:
  // F1 = phi*, F2 = -(phi*)' = 2 r e^{-r^2}.
  DiracChannelProblem problem(zero_pair(), 0, 1.0, 0.0, desk_grid(2000));
  const auto f1 = RadialProfile::gauss(0, 1.0);
  const auto f2 = RadialProfile::gauss(1, 1.0, 2.0);
  const auto r = weak_solve(problem, f1, f2);
  CHECK(r.refinements == 0);
  double err = 0.0;
  double chi_max = 0.0;
  for (double x = 1e-5; x < 20.0; x *= 1.01) {
    err = std::max(err, std::abs(r.phi(x) - std::exp(-x * x)));
    chi_max = std::max(chi_max, std::abs(r.chi(x)));
  }
  CHECK(err <= 1e-6);
  CHECK(chi_max <= 1e-5);
  CHECK(r.residual_upper <= 1e-6 * r.rhs_norm);
  CHECK(r.residual_lower <= 1e-6 * r.rhs_norm);

  // Residuals decay at least linearly under grid doubling.
  double previous = 0.0;
  for (std::size_t n : {250, 500, 1000}) {
    DiracChannelProblem p = problem;
    p.grid = desk_grid(n);
    const auto s = weak_solve_fixed(p, f1, f2);
    const double res = s.residual_upper + s.residual_lower;
    if (previous > 0.0) CHECK(res < 0.6 * previous);
    previous = res;
  }
}

TEST_CASE("weak solve: Coulomb residuals and refinement") {
  const auto pair = coulomb_pair(0.5, 0.5);
  DiracChannelProblem problem(pair, 0, 1.0, default_lambda(pair, 1.0), desk_grid(2000));
  const auto f1 = RadialProfile::exp(0, 1.0);
  const auto r = weak_solve(problem, f1, RadialProfile());
  CHECK(r.residual_upper + r.residual_lower <= 1e-6 * r.rhs_norm);
  CHECK(std::isfinite(r.h_norm_phi));
  CHECK(r.h_norm_phi > 0.0);

  double previous = 0.0;
  for (std::size_t n : {250, 500, 1000}) {
    DiracChannelProblem p = problem;
    p.grid = desk_grid(n);
    const auto s = weak_solve_fixed(p, f1, RadialProfile());
    const double res = s.residual_upper + s.residual_lower;
    if (previous > 0.0) CHECK(res <= 0.5 * previous);
    previous = res;
  }

  // Coarse grid plus refinement reaches the target; an impossible target
  // reports a convergence error.
  DiracChannelProblem coarse = problem;
  coarse.grid = desk_grid(150);
  const auto refined = weak_solve(coarse, f1, RadialProfile());
  CHECK(refined.refinements >= 1);
  WeakSolveOptions strict;
  strict.tolerance = 1e-15;
  strict.max_refinements = 1;
  CHECK_THROWS_AS(weak_solve(coarse, f1, RadialProfile(), strict), ConvergenceError);
  CHECK_THROWS_AS(weak_solve(DiracChannelProblem(coulomb_pair(3.0, 3.0), 0, 1.0, 0.0, desk_grid(100)),
                             f1, RadialProfile()),
                  HypothesisError);
}

TEST_CASE("weak solve: shells enter through the form") {
  PotentialPair shell;
  shell.v1_shells = {{1.0, 1.0}};
  shell.v2 = RadialWeight::coulomb(1.0);
  shell.c1 = 0.6;
  shell.c2 = 0.5;
  DiracChannelProblem problem(shell, 0, 1.0, default_lambda(shell, 1.0), desk_grid(1000));
  const auto r = weak_solve(problem, RadialProfile::exp(0, 1.0), RadialProfile());
  // The regular residuals vanish off the shell; g jumps by the shell charge.
  CHECK(r.residual_upper + r.residual_lower <= 1e-6 * r.rhs_norm);
  const double jump = std::abs(r.chi(1.0 + 1e-9) - r.chi(1.0 - 1e-9));
  CHECK(jump == doctest::Approx(0.6 * std::abs(r.phi(1.0))).epsilon(1e-5));
}

TEST_CASE("weak solve: discrete symmetry, bijectivity and stability") {
  const auto pair = coulomb_pair(0.5, 0.5);
  DiracChannelProblem problem(pair, 0, 1.0, default_lambda(pair, 1.0), desk_grid(400));
  std::mt19937_64 rng(2024);
  std::vector<WeakSolveResult> solves;
  for (int i = 0; i < 20; ++i)
    solves.push_back(weak_solve_fixed(problem, random_profile(rng, 0), random_profile(rng, 0)));
  int pairs = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < solves.size() && pairs < 50; ++i) {
    for (std::size_t j = i + 1; j < solves.size() && pairs < 50; ++j, ++pairs) {
      const Complex uv = discrete_pairing(solves[i], solves[j]);
      const Complex vu = discrete_pairing(solves[j], solves[i]);
      const double scale = discrete_norm(solves[i]) * discrete_norm(solves[j]);
      worst = std::max(worst, std::abs(uv - std::conj(vu)) / scale);
    }
  }
  CHECK(pairs == 50);
  CHECK(worst <= 1e-8);

  // apply_H on the solution reproduces the data.
  const auto& u = solves.front();
  const auto h = apply_H(problem, u.phi, u.chi);
  const double lo = 1e-5, hi = 40.0;
  CHECK(l2_distance(h.upper, u.f1, lo, hi) <= 1e-5 * u.rhs_norm);
  CHECK(l2_distance(h.lower, u.f2, lo, hi) <= 1e-5 * u.rhs_norm);

  // Repeat solves are bit-identical; perturbations act linearly.
  const auto again = weak_solve_fixed(problem, u.f1, u.f2);
  const auto a = u.fe_phi->coefficients();
  const auto b = again.fe_phi->coefficients();
  CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  const auto g = RadialProfile::gauss(0, 0.8);
  const double delta = 1e-3;
  const auto moved = weak_solve_fixed(
      problem, RadialProfile::callable([&](double r) { return u.f1(r) + delta * g(r); }), u.f2);
  const auto direction = weak_solve_fixed(problem, g, RadialProfile());
  for (double x : {1e-3, 0.3, 2.0, 7.0}) {
    CHECK(std::abs(moved.phi(x) - u.phi(x) - delta * direction.phi(x)) <=
          1e-6 * delta * (1.0 + std::abs(direction.phi(x))));
  }
}

TEST_CASE("gap spectrum: Coulomb closed form") {
  const double nu = 0.5;
  const double ground = std::sqrt(1.0 - nu * nu);
  const double second = 1.0 / std::sqrt(1.0 + nu * nu / std::pow(1.0 + ground, 2));
  const auto pair = coulomb_pair(nu, nu);
  DiracChannelProblem s_wave(pair, 0, 1.0, default_lambda(pair, 1.0), desk_grid(1000));
  const auto s = spectrum_in_gap(s_wave, 2);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(std::abs(s.eigenvalues[0].value - ground) < 1e-7);
  CHECK(std::abs(s.eigenvalues[1].value - second) < 1e-7);
  CHECK(s.eigenvalues[0].error_estimate < 1e-6);

  // k = -2 starts at the second level (same n_r + |kappa|).
  DiracChannelProblem p_wave(pair, -2, 1.0, default_lambda(pair, 1.0), desk_grid(1000));
  const auto p = spectrum_in_gap(p_wave, 1);
  REQUIRE(p.eigenvalues.size() == 1);
  CHECK(std::abs(p.eigenvalues[0].value - second) < 1e-7);

  CHECK(count_below(s_wave, 0.9) == 1);
  CHECK(count_below(s_wave, 0.97) == 2);
}

TEST_CASE("gap spectrum: free operator has none") {
  DiracChannelProblem free(zero_pair(), 0, 1.0, 0.0, desk_grid(500));
  CHECK(spectrum_in_gap(free, 3).eigenvalues.empty());
  CHECK(count_below(free, 0.999) == 0);
}

TEST_CASE("gap spectrum: mass scaling and convergence order") {
  const auto pair = coulomb_pair(0.5, 0.5);
  const auto wide = RadialGrid::log_uniform(1e-6, 200.0, 1200);
  DiracChannelProblem unit(pair, 0, 1.0, 0.0, wide);
  const auto base = gap_eigenvalues_fixed(unit, 2);
  for (double m : {0.5, 2.0}) {
    DiracChannelProblem scaled(pair, 0, m, 0.0, wide);
    const auto e = gap_eigenvalues_fixed(scaled, 2);
    REQUIRE(e.size() == base.size());
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - m * base[i]) < 1e-6 * m);
  }

  // Linear elements: |E(h) - E(h/2)| shrinks with order close to 2.
  DiracChannelProblem linear(pair, 0, 1.0, 0.0, desk_grid(1000), 1);
  SpectrumOptions options;
  options.estimate_order = true;
  options.stability_tolerance = 1e-4;
  const auto s = spectrum_in_gap(linear, 1, options);
  REQUIRE(s.eigenvalues.size() == 1);
  CHECK(s.eigenvalues[0].observed_order >= 1.8);
  CHECK(std::abs(s.eigenvalues[0].value - std::sqrt(0.75)) < 1e-5);
}

TEST_CASE("gap spectrum: unstable eigenvalues are dropped with a warning") {
  // Rydberg-like levels close to m do not fit in a short box and move under
  // refinement.
  const auto pair = coulomb_pair(0.5, 0.5);
  DiracChannelProblem box(pair, 0, 1.0, 0.0, RadialGrid::log_uniform(1e-6, 12.0, 400));
  const auto s = spectrum_in_gap(box, 6);
  CHECK(!s.warnings.empty());
  for (const auto& e : s.eigenvalues) CHECK(e.value < 1.0);
  CHECK(s.eigenvalues.size() < 6);
}

TEST_CASE("shell spectrum sweep") {
  const auto grid = desk_grid(600);
  const std::vector<int> ks{0};
  const std::vector<double> as{0.0, 0.6, 0.7, 0.8};
  const auto table = shell_spectrum_demo(as, 1.0, 0.5, 1.0, ks, grid, 1);
  // a = 0 leaves w2 = nu / r alone, which is repulsive for the upper part.
  PotentialPair w2_only;
  w2_only.v2 = RadialWeight::coulomb(0.5);
  w2_only.c1 = 0.0;
  const auto direct = spectrum_in_gap(DiracChannelProblem(w2_only, 0, 1.0, 0.5, grid), 1);
  std::size_t at_zero = 0;
  for (const auto& row : table.rows) at_zero += row.a == 0.0;
  CHECK(at_zero == direct.eigenvalues.size());
  CHECK(table.warnings.empty());

  // Monotone in a and continuous: nearby strengths give nearby levels.
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].value > table.rows[1].value);
  CHECK(table.rows[1].value > table.rows[2].value);
  const std::vector<double> close{0.7, 0.7005, 0.701};
  const auto fine = shell_spectrum_demo(close, 1.0, 0.5, 1.0, ks, grid, 1);
  REQUIRE(fine.rows.size() == 3);
  const double d1 = fine.rows[0].value - fine.rows[1].value;
  const double d2 = fine.rows[1].value - fine.rows[2].value;
  CHECK(d1 > 0.0);
  CHECK(d1 < 1e-2);
  CHECK(d2 == doctest::Approx(d1).epsilon(0.05));

  const std::vector<double> outside{1.0};
  const auto flagged = shell_spectrum_demo(outside, 1.0, 0.5, 1.0, ks, grid, 1);
  CHECK(!flagged.warnings.empty());
  for (const auto& row : flagged.rows) CHECK(row.outside_regime);
}
