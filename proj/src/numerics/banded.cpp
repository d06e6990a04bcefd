#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"

namespace hardy::numerics {

BandedSymmetric::BandedSymmetric(std::size_t n, std::size_t bandwidth)
    : n_(n), kd_(bandwidth), ab_((bandwidth + 1) * n, 0.0) {
  if (n == 0) throw InputError("banded matrix must be non-empty");
  if (bandwidth >= n && n > 1) kd_ = n - 1;
  ab_.assign((kd_ + 1) * n_, 0.0);
}

BandedSymmetric BandedSymmetric::identity(std::size_t n) {
  BandedSymmetric m(n, 0);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

std::size_t BandedSymmetric::index(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  return (i - j) + j * (kd_ + 1);
}

double BandedSymmetric::operator()(std::size_t i, std::size_t j) const {
  const std::size_t d = i > j ? i - j : j - i;
  if (d > kd_) return 0.0;
  return ab_[index(i, j)];
}

void BandedSymmetric::set(std::size_t i, std::size_t j, double value) {
  const std::size_t d = i > j ? i - j : j - i;
  if (d > kd_ || i >= n_ || j >= n_) throw InputError("banded matrix: entry outside the band");
  ab_[index(i, j)] = value;
}

void BandedSymmetric::add(std::size_t i, std::size_t j, double value) {
  const std::size_t d = i > j ? i - j : j - i;
  if (d > kd_ || i >= n_ || j >= n_) throw InputError("banded matrix: entry outside the band");
  ab_[index(i, j)] += value;
}

namespace {

template <class T>
std::vector<T> band_multiply(const BandedSymmetric& a, std::span<const T> x) {
  const std::size_t n = a.size();
  const std::size_t kd = a.bandwidth();
  if (x.size() != n) throw InputError("banded multiply: size mismatch");
  std::vector<T> y(n, T{});
  const auto ab = a.band_storage();
  for (std::size_t j = 0; j < n; ++j) {
    y[j] += ab[j * (kd + 1)] * x[j];
    const std::size_t i_end = std::min(n, j + kd + 1);
    for (std::size_t i = j + 1; i < i_end; ++i) {
      const double v = ab[(i - j) + j * (kd + 1)];
      y[i] += v * x[j];
      y[j] += v * x[i];
    }
  }
  return y;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> BandedSymmetric::multiply(std::span<const double> x) const {
  return band_multiply<double>(*this, x);
}

std::vector<std::complex<double>> BandedSymmetric::multiply(
    std::span<const std::complex<double>> x) const {
  return band_multiply<std::complex<double>>(*this, x);
}

BandedCholesky::BandedCholesky(const BandedSymmetric& matrix)
    : matrix_(&matrix), factor_(matrix.band_storage().begin(), matrix.band_storage().end()) {
  const auto n = static_cast<lapack_int>(matrix.size());
  const auto kd = static_cast<lapack_int>(matrix.bandwidth());
  const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', n, kd, factor_.data(), kd + 1);
  if (info > 0) {
    throw NotPositiveDefinite("banded Cholesky: matrix is not positive definite (leading minor " +
                              std::to_string(info) + ")");
  }
  if (info < 0) throw InputError("banded Cholesky: invalid argument to dpbtrf");
}

std::vector<double> BandedCholesky::solve_once(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  const auto n = static_cast<lapack_int>(matrix_->size());
  const auto kd = static_cast<lapack_int>(matrix_->bandwidth());
  const lapack_int info =
      LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', n, kd, 1, factor_.data(), kd + 1, x.data(), n);
  if (info != 0) throw NumericalError("banded Cholesky: dpbtrs failed");
  return x;
}

std::vector<double> BandedCholesky::solve(std::span<const double> rhs) const {
  if (rhs.size() != matrix_->size()) throw InputError("banded solve: size mismatch");
  auto x = solve_once(rhs);
  const double b_norm = norm2(rhs);
  for (int step = 0; step < 2; ++step) {
    const auto ax = matrix_->multiply(std::span<const double>(x));
    std::vector<double> r(rhs.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - ax[i];
    if (norm2(r) <= 1e-14 * b_norm) break;
    const auto dx = solve_once(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }
  return x;
}

std::vector<std::complex<double>> BandedCholesky::solve(
    std::span<const std::complex<double>> rhs) const {
  std::vector<double> re(rhs.size());
  std::vector<double> im(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    re[i] = rhs[i].real();
    im[i] = rhs[i].imag();
  }
  const auto xr = solve(re);
  const auto xi = solve(im);
  std::vector<std::complex<double>> x(rhs.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = {xr[i], xi[i]};
  return x;
}

std::vector<double> solve_banded_hermitian(const BandedSymmetric& matrix,
                                           std::span<const double> rhs) {
  return BandedCholesky(matrix).solve(rhs);
}

std::vector<std::complex<double>> solve_banded_hermitian(
    const BandedSymmetric& matrix, std::span<const std::complex<double>> rhs) {
  return BandedCholesky(matrix).solve(rhs);
}

namespace {

// Copy of a band matrix widened (with zeros) to `kd` sub-diagonals.
std::vector<double> widened(const BandedSymmetric& m, std::size_t kd) {
  const std::size_t n = m.size();
  std::vector<double> ab((kd + 1) * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i_end = std::min(n, j + m.bandwidth() + 1);
    for (std::size_t i = j; i < i_end; ++i) ab[(i - j) + j * (kd + 1)] = m(i, j);
  }
  return ab;
}

}  // namespace

std::vector<EigenPair> eig_banded_hermitian(const BandedSymmetric& a, const BandedSymmetric& b,
                                            double lo, double hi, std::size_t count) {
  if (a.size() != b.size()) throw InputError("eig_banded_hermitian: size mismatch");
  if (!(lo < hi)) throw InputError("eig_banded_hermitian: empty window");
  const std::size_t n = a.size();
  const std::size_t ka = std::max(a.bandwidth(), b.bandwidth());
  const std::size_t kb = b.bandwidth();
  auto ab = widened(a, ka);
  auto bb = widened(b, kb);

  {
    // dsbgvx reports a failed B factorization through info > n; checking up
    // front gives a clean error.
    BandedCholesky check(b);
  }

  const auto ni = static_cast<lapack_int>(n);
  std::vector<double> q(n * n);
  std::vector<double> w(n);
  std::vector<double> z(n * n);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsbgvx(
      LAPACK_COL_MAJOR, 'V', 'V', 'L', ni, static_cast<lapack_int>(ka),
      static_cast<lapack_int>(kb), ab.data(), static_cast<lapack_int>(ka + 1), bb.data(),
      static_cast<lapack_int>(kb + 1), q.data(), ni, lo, hi, 0, 0, 0.0, &found, w.data(),
      z.data(), ni, ifail.data());
  if (info > ni) throw NotPositiveDefinite("eig_banded_hermitian: B is not positive definite");
  if (info != 0) throw NumericalError("eig_banded_hermitian: dsbgvx failed to converge");

  std::vector<EigenPair> out;
  const auto m = static_cast<std::size_t>(found);
  for (std::size_t k = 0; k < m && out.size() < count; ++k) {
    EigenPair pair;
    pair.value = w[k];
    pair.vector.assign(z.begin() + static_cast<std::ptrdiff_t>(k * n),
                       z.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    out.push_back(std::move(pair));
  }
  return out;
}

// Sylvester's law of inertia on A = L D L^T (no pivoting): the number of
// negative pivots equals the number of negative eigenvalues. Zero pivots are
// nudged to a tiny positive value, which counts an eigenvalue at exactly zero
// as nonnegative. Unlike an eigenvalue count from a reduced tridiagonal form,
// the pivots keep their relative accuracy on strongly graded matrices.
std::size_t negative_inertia(const BandedSymmetric& matrix) {
  const std::size_t n = matrix.size();
  const std::size_t kd = matrix.bandwidth();
  // l[i * kd + (i - j - 1)] = L(i, j) for j in [i - kd, i).
  std::vector<double> l(n * std::max<std::size_t>(kd, 1), 0.0);
  std::vector<double> d(n, 0.0);
  const auto L = [&](std::size_t i, std::size_t j) -> double& { return l[i * kd + (i - j - 1)]; };
  std::size_t negative = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j > kd ? j - kd : 0;
    double pivot = matrix(j, j);
    for (std::size_t k = k0; k < j; ++k) pivot -= L(j, k) * L(j, k) * d[k];
    if (pivot == 0.0) pivot = std::numeric_limits<double>::min();
    d[j] = pivot;
    if (pivot < 0.0) ++negative;
    const std::size_t i1 = std::min(n, j + kd + 1);
    for (std::size_t i = j + 1; i < i1; ++i) {
      double v = matrix(i, j);
      const std::size_t m0 = i > kd ? i - kd : 0;
      for (std::size_t k = std::max(k0, m0); k < j; ++k) v -= L(i, k) * L(j, k) * d[k];
      L(i, j) = v / pivot;
    }
  }
  return negative;
}

}  // namespace hardy::numerics
