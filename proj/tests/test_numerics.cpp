#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"

using namespace hardy;
using namespace hardy::numerics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense Gaussian elimination with partial pivoting; test oracle only.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
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

BandedSymmetric laplacian_plus_identity(std::size_t n) {
  BandedSymmetric m(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    m.set(i, i, 3.0);
    if (i + 1 < n) m.set(i + 1, i, -1.0);
  }
  return m;
}

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("radial grids") {
  const auto g = RadialGrid::log_uniform(1e-6, 50.0, 101);
  CHECK(g.size() == 101);
  CHECK(g.r_min() == 1e-6);
  CHECK(g.r_max() == 50.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes()[i] > g.nodes()[i - 1]);

  const auto fine = g.refined();
  CHECK(fine.size() >= 2 * g.size());
  CHECK(fine.r_min() == doctest::Approx(g.r_min() / 2));
  CHECK(fine.r_max() == doctest::Approx(g.r_max() * 2));

  const auto alg = RadialGrid::algebraic(1e-4, 100.0, 50);
  CHECK(alg.r_min() == 1e-4);
  CHECK(alg.r_max() == 100.0);
  CHECK(alg.transform() == GridTransform::algebraic);

  CHECK_THROWS_AS(RadialGrid::from_nodes({1.0, 0.5}, GridTransform::log_uniform), InputError);
  CHECK_THROWS_AS(RadialGrid::from_nodes({0.0, 0.5}, GridTransform::log_uniform), InputError);
}

TEST_CASE("integrate_radial reference integrals") {
  const auto gamma3 = integrate_radial([](double r) { return std::exp(-r) * r * r; }, 0.0, kInf);
  CHECK(std::abs(gamma3.value - 2.0) <= 1e-10);
  CHECK(gamma3.abs_error_estimate >= 0.0);

  const auto root = integrate_radial([](double r) { return 1.0 / std::sqrt(r); }, 0.0, 1.0,
                                     SingularityHint::inverse_r_at_0);
  CHECK(std::abs(root.value - 2.0) <= 1e-9);

  const auto coulomb_pair =
      integrate_radial([](double r) { return 2.0 * r; }, 0.0, 3.0);
  CHECK(coulomb_pair.value == doctest::Approx(9.0).epsilon(1e-12));

  const auto finite = integrate_radial([](double r) { return r; }, 1.0, 2.0);
  CHECK(finite.value == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("integrate_radial with breakpoints handles kinks") {
  const auto tent = [](double r) { return std::max(0.0, 1.0 - std::abs(r - 2.0)); };
  const double bp[] = {1.0, 2.0, 3.0};
  const auto q = integrate_radial(tent, 0.0, kInf, SingularityHint::none, bp);
  CHECK(q.value == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("integrate_radial errors") {
  CHECK_THROWS_AS(integrate_radial([](double) { return std::nan(""); }, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(integrate_radial([](double r) { return r; }, 2.0, 1.0), InputError);
  // 1/r on (0, 1) diverges logarithmically.
  try {
    integrate_radial([](double r) { return 1.0 / r; }, 0.0, 1.0);
    FAIL("expected divergence");
  } catch (const QuadratureError& e) {
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("integrate_radial is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto f = [](double r) { return r * r * std::exp(-r); };
  const auto g = [](double r) { return std::exp(-r * r) / (1.0 + r); };
  const double fi = integrate_radial(f, 0.0, kInf).value;
  const double gi = integrate_radial(g, 0.0, kInf).value;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng);
    const double b = u(rng);
    const double combo =
        integrate_radial([&](double r) { return a * f(r) + b * g(r); }, 0.0, kInf).value;
    CHECK(std::abs(combo - (a * fi + b * gi)) <= 1e-9 * (std::abs(a * fi) + std::abs(b * gi) + 1));
  }
}

TEST_CASE("complex quadrature") {
  const auto v = integrate_radial_complex(
      [](double r) { return std::complex<double>(r * r * std::exp(-r), -std::exp(-r)); }, 0.0,
      kInf);
  CHECK(v.real() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(v.imag() == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("sup_over_r on r^2 e^-r matches calculus and a dense scan") {
  const auto g = [](double r) { return r * r * std::exp(-r); };
  const auto s = sup_over_r(g);
  const double exact = 4.0 * std::exp(-2.0);
  CHECK(s.value == doctest::Approx(exact).epsilon(1e-10));
  CHECK(s.argmax == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(s.location == SupLocation::interior);

  // Brute force oracle: 2e5 log-spaced samples.
  double brute = 0.0;
  for (int i = 0; i <= 200000; ++i) brute = std::max(brute, g(std::pow(10.0, -6.0 + 12.0 * i / 200000.0)));
  CHECK(s.value >= brute - 1e-12);
  CHECK(s.value - brute <= 1e-9);
}

TEST_CASE("sup_over_r edge cases") {
  CHECK(sup_over_r([](double) { return 0.0; }).value == 0.0);
  CHECK_THROWS_AS(sup_over_r([](double r) { return 1.0 / r; }), NotInClassA);
  CHECK_THROWS_AS(sup_over_r([](double r) { return std::log(1.0 + r); }), NotInClassA);

  const auto saturating = sup_over_r([](double r) { return 1.0 - 1.0 / (1.0 + r); });
  CHECK(saturating.value == doctest::Approx(1.0).epsilon(1e-8));

  const auto toward_zero = sup_over_r([](double r) { return 1.0 / (1.0 + std::sqrt(r)); });
  CHECK(toward_zero.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(toward_zero.location == SupLocation::at_zero);

  // A narrow jump caught only through an explicit breakpoint.
  SupSearchConfig cfg;
  cfg.breakpoints = {std::numbers::pi};
  const auto jump = sup_over_r([](double r) { return r == std::numbers::pi ? 3.0 : 1.0 / (1 + r * r); }, cfg);
  CHECK(jump.value == 3.0);
  CHECK(jump.argmax == std::numbers::pi);
}

TEST_CASE("sup_over_r never reports below its own samples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> centre(-3.0, 3.0);
  std::uniform_real_distribution<double> height(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double c1 = centre(rng), c2 = centre(rng), h1 = height(rng), h2 = height(rng);
    const auto g = [=](double r) {
      const double t = std::log(r);
      return h1 * std::exp(-(t - c1) * (t - c1)) + h2 * std::exp(-4.0 * (t - c2) * (t - c2));
    };
    const auto s = sup_over_r(g);
    for (int i = 0; i <= 400; ++i) {
      const double r = std::pow(10.0, -6.0 + 12.0 * i / 400.0);
      CHECK(s.value >= g(r) - 1e-12);
    }
  }
}

TEST_CASE("solve_banded_hermitian") {
  SUBCASE("identity") {
    const std::vector<double> b{1.0, -2.0, 3.5};
    const auto x = solve_banded_hermitian(BandedSymmetric::identity(3), b);
    CHECK(x == b);
  }
  SUBCASE("laplacian plus identity against dense elimination") {
    const std::size_t n = 200;
    const auto a = laplacian_plus_identity(n);
    std::vector<double> b(n, 0.0);
    b[0] = 1.0;
    const auto x = solve_banded_hermitian(a, b);
    const auto ax = a.multiply(std::span<const double>(x));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = ax[i] - b[i];
    CHECK(norm(r) <= 1e-12 * norm(b));

    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dense[i][j] = a(i, j);
    const auto oracle = dense_solve(dense, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
  }
  SUBCASE("indefinite matrix is rejected") {
    BandedSymmetric a(3, 1);
    a.set(0, 0, 1.0);
    a.set(1, 1, -1.0);
    a.set(2, 2, 1.0);
    CHECK_THROWS_AS(solve_banded_hermitian(a, std::vector<double>{1, 1, 1}), NotPositiveDefinite);
  }
  SUBCASE("complex right-hand side") {
    const auto a = laplacian_plus_identity(20);
    std::vector<std::complex<double>> b(20);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = {std::sin(1.0 * i), std::cos(2.0 * i)};
    const auto x = solve_banded_hermitian(a, std::span<const std::complex<double>>(b));
    const auto ax = a.multiply(std::span<const std::complex<double>>(x));
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(ax[i] - b[i]) <= 1e-13);
  }
}

TEST_CASE("random SPD band systems solve to 1e-12 relative residual") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 50 + 10 * trial;
    const std::size_t kd = 1 + trial % 4;
    BandedSymmetric a(n, kd);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = (i > kd ? i - kd : 0); j < i; ++j) {
        const double v = u(rng);
        a.set(i, j, v);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) row += std::abs(a(i, j));
      a.set(i, i, row + 0.1);
    }
    std::vector<double> b(n);
    for (auto& v : b) v = u(rng);
    const auto x = solve_banded_hermitian(a, b);
    const auto ax = a.multiply(std::span<const double>(x));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = ax[i] - b[i];
    CHECK(norm(r) <= 1e-12 * norm(b));
  }
}

TEST_CASE("eig_banded_hermitian") {
  SUBCASE("diagonal pencil") {
    BandedSymmetric a(3, 0);
    a.set(0, 0, 1.0);
    a.set(1, 1, 2.0);
    a.set(2, 2, 3.0);
    const auto eig = eig_banded_hermitian(a, BandedSymmetric::identity(3), 0.5, 2.5, 10);
    REQUIRE(eig.size() == 2);
    CHECK(eig[0].value == doctest::Approx(1.0));
    CHECK(eig[1].value == doctest::Approx(2.0));
  }
  SUBCASE("Dirichlet Laplacian on [0, pi]") {
    std::vector<double> previous_error;
    for (std::size_t n : {50u, 100u, 200u}) {
      const double h = std::numbers::pi / static_cast<double>(n + 1);
      BandedSymmetric a(n, 1);
      for (std::size_t i = 0; i < n; ++i) {
        a.set(i, i, 2.0 / (h * h));
        if (i + 1 < n) a.set(i + 1, i, -1.0 / (h * h));
      }
      const auto b = BandedSymmetric::identity(n);
      const auto eig = eig_banded_hermitian(a, b, 0.0, 5.0, 10);
      REQUIRE(eig.size() == 2);
      std::vector<double> errors;
      for (std::size_t m = 0; m < 2; ++m) {
        // Exact discrete eigenvalues of the 3-point stencil.
        const double mode = static_cast<double>(m + 1);
        const double discrete = 4.0 / (h * h) * std::pow(std::sin(mode * h / 2.0), 2);
        CHECK(eig[m].value == doctest::Approx(discrete).epsilon(1e-10));
        errors.push_back(std::abs(eig[m].value - mode * mode));

        const auto av = a.multiply(std::span<const double>(eig[m].vector));
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = av[i] - eig[m].value * eig[m].vector[i];
        CHECK(norm(r) <= 1e-8 * norm(eig[m].vector) * std::max(1.0, eig[m].value));
      }
      if (!previous_error.empty()) {
        CHECK(errors[0] < previous_error[0]);
        CHECK(errors[1] < previous_error[1]);
      }
      previous_error = errors;
    }
  }
  SUBCASE("empty window is not an error") {
    const auto eig = eig_banded_hermitian(BandedSymmetric::identity(4),
                                          BandedSymmetric::identity(4), 2.0, 3.0, 5);
    CHECK(eig.empty());
  }
  SUBCASE("singular B is rejected") {
    BandedSymmetric b(2, 0);
    b.set(0, 0, 1.0);
    CHECK_THROWS_AS(eig_banded_hermitian(BandedSymmetric::identity(2), b, 0.0, 2.0, 2),
                    NotPositiveDefinite);
  }
}

TEST_CASE("negative inertia") {
  BandedSymmetric a(3, 1);
  a.set(0, 0, -1.0);
  a.set(1, 1, 2.0);
  a.set(2, 2, -3.0);
  CHECK(negative_inertia(a) == 2);
  CHECK(negative_inertia(laplacian_plus_identity(30)) == 0);
}
