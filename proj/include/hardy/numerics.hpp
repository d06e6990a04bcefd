#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace hardy::numerics {

using RealFunction = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Radial grids
// ---------------------------------------------------------------------------

enum class GridTransform { log_uniform, algebraic };

std::string_view to_string(GridTransform transform);

/// Strictly increasing set of positive radii.
class RadialGrid {
 public:
  /// n points, uniform in t = ln r, covering [r_min, r_max].
  static RadialGrid log_uniform(double r_min, double r_max, std::size_t n);

  /// n points r_i = scale * x_i / (1 - x_i) with x uniform on (0, 1); clusters
  /// nodes near the origin like a log grid but reaches far out algebraically.
  static RadialGrid algebraic(double r_min, double r_max, std::size_t n);

  static RadialGrid from_nodes(std::vector<double> nodes, GridTransform transform);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double r_min() const noexcept { return nodes_.front(); }
  double r_max() const noexcept { return nodes_.back(); }
  GridTransform transform() const noexcept { return transform_; }

  /// At least twice the nodes, r_min halved and r_max doubled.
  RadialGrid refined() const;

 private:
  RadialGrid(std::vector<double> nodes, GridTransform transform);

  std::vector<double> nodes_;
  GridTransform transform_;
};

// ---------------------------------------------------------------------------
// Quadrature on (0, inf)
// ---------------------------------------------------------------------------

struct Quadrant {
  double value = 0.0;
  double abs_error_estimate = 0.0;
};

enum class SingularityHint { none, inverse_r_at_0, decay_at_inf };

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// Maximal bisection level of any piece.
  unsigned max_depth = 18;
  /// Cap on the number of pieces in the adaptive partition.
  std::size_t max_pieces = 4000;
};

/// Integrates f over (a, b), 0 <= a < b <= inf, after the substitution
/// r = e^t. Breakpoints strictly inside (a, b) split the interval (kinks,
/// compact supports, tabulated data).
///
/// Throws InputError on NaN from f or a bad interval and QuadratureError when
/// the tolerance cannot be met; the latter carries the partial value.
Quadrant integrate_radial(const RealFunction& f, double a, double b,
                          SingularityHint hint = SingularityHint::none,
                          std::span<const double> breakpoints = {},
                          const QuadratureOptions& options = {});

/// Complex-valued convenience wrapper, real and imaginary parts integrated
/// separately.
std::complex<double> integrate_radial_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    std::span<const double> breakpoints = {}, const QuadratureOptions& options = {});

// ---------------------------------------------------------------------------
// Supremum over r > 0
// ---------------------------------------------------------------------------

enum class SupLocation { interior, at_zero, at_infinity };

std::string_view to_string(SupLocation location);

struct SupSearchConfig {
  double r_lo = 1e-6;
  double r_hi = 1e6;
  int points_per_decade = 24;
  int refinement_rounds = 80;
  double rel_tol = 1e-8;
  /// Points evaluated exactly; used for jump locations such as shell radii.
  std::vector<double> breakpoints;
  /// Decades probed beyond each end of the scan for limit detection.
  int tail_decades = 6;
};

struct SupResult {
  double value = 0.0;
  double argmax = 1.0;
  SupLocation location = SupLocation::interior;
};

/// Supremum of g over r > 0: log-uniform scan, golden-section refinement
/// around the best bracket and tail probes at both ends. Throws NotInClassA
/// when growth toward 0 or infinity does not saturate.
SupResult sup_over_r(const RealFunction& g, const SupSearchConfig& config = {});

// ---------------------------------------------------------------------------
// Banded symmetric linear algebra
// ---------------------------------------------------------------------------

/// Real symmetric band matrix with `bandwidth` sub-diagonals, stored in
/// LAPACK lower band layout. The discretized problems in this library are
/// real, so Hermitian reduces to symmetric; complex right-hand sides are
/// handled by linearity.
class BandedSymmetric {
 public:
  BandedSymmetric(std::size_t n, std::size_t bandwidth);

  static BandedSymmetric identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return kd_; }

  /// Element (i, j), zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);
  void add(std::size_t i, std::size_t j, double value);

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<std::complex<double>> multiply(std::span<const std::complex<double>> x) const;

  std::span<const double> band_storage() const noexcept { return ab_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t n_;
  std::size_t kd_;
  std::vector<double> ab_;
};

/// Cholesky factorization of a positive definite band matrix.
class BandedCholesky {
 public:
  /// Throws NotPositiveDefinite when the factorization breaks down.
  explicit BandedCholesky(const BandedSymmetric& matrix);

  /// Solves A x = b with up to two steps of iterative refinement.
  std::vector<double> solve(std::span<const double> rhs) const;
  std::vector<std::complex<double>> solve(std::span<const std::complex<double>> rhs) const;

 private:
  std::vector<double> solve_once(std::span<const double> rhs) const;

  const BandedSymmetric* matrix_;
  std::vector<double> factor_;
};

std::vector<double> solve_banded_hermitian(const BandedSymmetric& matrix,
                                           std::span<const double> rhs);
std::vector<std::complex<double>> solve_banded_hermitian(
    const BandedSymmetric& matrix, std::span<const std::complex<double>> rhs);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

/// Eigenpairs of A v = E B v with E in (lo, hi), ascending, at most `count`.
/// B must be positive definite (NotPositiveDefinite otherwise). Eigenvectors
/// are B-normalized.
std::vector<EigenPair> eig_banded_hermitian(const BandedSymmetric& a, const BandedSymmetric& b,
                                            double lo, double hi, std::size_t count);

/// Number of eigenvalues of the symmetric band matrix strictly below zero
/// (its negative inertia).
std::size_t negative_inertia(const BandedSymmetric& matrix);

}  // namespace hardy::numerics
