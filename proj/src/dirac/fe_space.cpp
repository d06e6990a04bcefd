#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "hardy/dirac.hpp"
#include "hardy/errors.hpp"

namespace hardy::dirac {

FeSpace::FeSpace(const numerics::RadialGrid& grid, int degree,
                 std::span<const double> extra_vertices)
    : degree_(degree) {
  if (degree < 1 || degree > 8) throw InputError("finite element degree must be in 1..8");
  if (grid.size() < 2) throw InputError("finite element mesh needs at least two nodes");
  for (double r : grid.nodes()) t_.push_back(std::log(r));

  for (double x : extra_vertices) {
    if (!(x > grid.r_min() && x < grid.r_max())) continue;
    const double tx = std::log(x);
    const auto it = std::lower_bound(t_.begin(), t_.end(), tx);
    const std::size_t hi = static_cast<std::size_t>(it - t_.begin());
    const std::size_t lo = hi - 1;
    const double spacing = t_[hi] - t_[lo];
    // Snap an interior neighbour onto the breakpoint rather than creating a
    // sliver element; endpoints stay put.
    if (tx - t_[lo] < 0.1 * spacing && lo > 0) {
      t_[lo] = tx;
    } else if (t_[hi] - tx < 0.1 * spacing && hi + 1 < t_.size()) {
      t_[hi] = tx;
    } else if (tx != t_[lo] && tx != t_[hi]) {
      t_.insert(it, tx);
    }
  }

  using Rule = boost::math::quadrature::gauss<double, kQuadPoints>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  // Boost stores the nonnegative half; mirror it.
  for (std::size_t i = x.size(); i-- > 0;) {
    qxi_.push_back(-x[i]);
    qw_.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    qxi_.push_back(x[i]);
    qw_.push_back(w[i]);
  }

  const std::size_t nb = static_cast<std::size_t>(degree_) + 1;
  ref_value_.resize(qxi_.size() * nb);
  ref_d1_.resize(qxi_.size() * nb);
  ref_d2_.resize(qxi_.size() * nb);
  for (std::size_t q = 0; q < qxi_.size(); ++q) {
    basis(qxi_[q], std::span(ref_value_).subspan(q * nb, nb), std::span(ref_d1_).subspan(q * nb, nb),
          std::span(ref_d2_).subspan(q * nb, nb));
  }
}

std::vector<double> FeSpace::vertex_radii() const {
  std::vector<double> r;
  r.reserve(t_.size());
  for (double t : t_) r.push_back(std::exp(t));
  return r;
}

double FeSpace::r_min() const { return std::exp(t_.front()); }
double FeSpace::r_max() const { return std::exp(t_.back()); }

std::size_t FeSpace::vertex_dof(double r) const {
  const double t = std::log(r);
  const auto it = std::lower_bound(t_.begin(), t_.end(), t - 1e-12);
  if (it == t_.end() || std::abs(*it - t) > 1e-12)
    throw InputError("radius " + std::to_string(r) + " is not a mesh vertex");
  return static_cast<std::size_t>(it - t_.begin()) * degree_;
}

void FeSpace::basis(double xi, std::span<double> value, std::span<double> d1,
                    std::span<double> d2) const {
  const int p = degree_;
  std::vector<double> nodes(p + 1);
  for (int j = 0; j <= p; ++j) nodes[j] = -1.0 + 2.0 * j / p;
  for (int j = 0; j <= p; ++j) {
    double den = 1.0;
    for (int l = 0; l <= p; ++l)
      if (l != j) den *= nodes[j] - nodes[l];
    double v = 1.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int l = 0; l <= p; ++l)
      if (l != j) v *= xi - nodes[l];
    for (int a = 0; a <= p; ++a) {
      if (a == j) continue;
      double prod_a = 1.0;
      for (int l = 0; l <= p; ++l)
        if (l != j && l != a) prod_a *= xi - nodes[l];
      s1 += prod_a;
      for (int b = 0; b <= p; ++b) {
        if (b == j || b == a) continue;
        double prod_ab = 1.0;
        for (int l = 0; l <= p; ++l)
          if (l != j && l != a && l != b) prod_ab *= xi - nodes[l];
        s2 += prod_ab;
      }
    }
    value[j] = v / den;
    d1[j] = s1 / den;
    d2[j] = s2 / den;
  }
}

FeSpace::PointBasis FeSpace::at_quad_point(std::size_t element, int q) const {
  const std::size_t nb = static_cast<std::size_t>(degree_) + 1;
  const double half = 0.5 * (t_[element + 1] - t_[element]);
  const double t = t_[element] + half * (qxi_[q] + 1.0);
  PointBasis b;
  b.r = std::exp(t);
  b.weight_dr = qw_[q] * half * b.r;
  b.value.assign(ref_value_.begin() + q * nb, ref_value_.begin() + (q + 1) * nb);
  b.dt.resize(nb);
  b.dtt.resize(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    b.dt[j] = ref_d1_[q * nb + j] / half;
    b.dtt[j] = ref_d2_[q * nb + j] / (half * half);
  }
  return b;
}

std::size_t FeSpace::locate(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto i = static_cast<std::ptrdiff_t>(it - t_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, t_.size() - 2));
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space, std::vector<Complex> coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != space_->dofs()) throw InputError("FeFunction: coefficient count mismatch");
}

std::array<Complex, 3> FeFunction::evaluate(double r) const {
  const auto ts = space_->vertex_t();
  if (!(r > 0.0)) return {0.0, 0.0, 0.0};
  const double t = std::log(r);
  if (t < ts.front() - 1e-14 || t > ts.back() + 1e-14) return {0.0, 0.0, 0.0};
  const std::size_t e = space_->locate(t);
  const double half = 0.5 * (ts[e + 1] - ts[e]);
  const double xi = std::clamp((t - ts[e]) / half - 1.0, -1.0, 1.0);
  const int p = space_->degree();
  std::vector<double> v(p + 1), d1(p + 1), d2(p + 1);
  space_->basis(xi, v, d1, d2);
  Complex f = 0.0, ft = 0.0, ftt = 0.0;
  for (int j = 0; j <= p; ++j) {
    const Complex c = coeffs_[e * p + j];
    f += c * v[j];
    ft += c * d1[j];
    ftt += c * d2[j];
  }
  ft /= half;
  ftt /= half * half;
  return {f, ft / r, (ftt - ft) / (r * r)};
}

std::array<Complex, 3> FeFunction::at_quad_point(std::size_t element, int,
                                                 const FeSpace::PointBasis& b) const {
  const int p = space_->degree();
  Complex f = 0.0, ft = 0.0, ftt = 0.0;
  for (int j = 0; j <= p; ++j) {
    const Complex c = coeffs_[element * p + j];
    f += c * b.value[j];
    ft += c * b.dt[j];
    ftt += c * b.dtt[j];
  }
  return {f, ft / b.r, (ftt - ft) / (b.r * b.r)};
}

RadialProfile FeFunction::profile() const {
  const auto self = std::make_shared<const FeFunction>(*this);
  return RadialProfile::callable([self](double r) { return self->evaluate(r)[0]; },
                                 [self](double r) { return self->evaluate(r)[1]; },
                                 space_->vertex_radii(), space_->r_min(), space_->r_max());
}

}  // namespace hardy::dirac
