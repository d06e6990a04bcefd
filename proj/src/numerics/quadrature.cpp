#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"

namespace hardy::numerics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTailLog = 345.0;  // |ln r| beyond which r^2 overflows

// Split points in t = ln r for the pieces of (a, b).
std::vector<double> log_split_points(double a, double b, SingularityHint hint,
                                     std::span<const double> breakpoints) {
  const double t_lo = a > 0.0 ? std::log(a) : -kInf;
  const double t_hi = std::isinf(b) ? kInf : std::log(b);

  std::vector<double> cuts;
  for (double bp : breakpoints) {
    if (bp > a && bp < b) cuts.push_back(std::log(bp));
  }
  // Extra subdivision toward the hinted end keeps the adaptive driver from
  // spending its budget on a single infinite piece.
  if (hint == SingularityHint::inverse_r_at_0 && std::isfinite(t_hi)) {
    for (double d : {4.0, 12.0, 30.0}) {
      const double c = t_hi - d;
      if (c > t_lo) cuts.push_back(c);
    }
  } else if (hint == SingularityHint::decay_at_inf && std::isfinite(t_lo)) {
    for (double d : {2.0, 4.0, 6.0}) {
      const double c = t_lo + d;
      if (c < t_hi) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> points;
  points.reserve(cuts.size() + 2);
  points.push_back(t_lo);
  for (double c : cuts) {
    if (c > points.back() && c < t_hi) points.push_back(c);
  }
  points.push_back(t_hi);
  return points;
}

// Maps u in a finite interval onto one piece [t0, t1] of the t axis, either
// end possibly infinite. Returns (t, dt/du).
struct PieceMap {
  double t0;
  double t1;

  double u_lo() const { return std::isinf(t0) && std::isinf(t1) ? -1.0 : 0.0; }
  double u_hi() const { return std::isinf(t0) || std::isinf(t1) ? 1.0 : t1 - t0; }

  std::pair<double, double> operator()(double u) const {
    if (std::isfinite(t0) && std::isfinite(t1)) return {t0 + u, 1.0};
    if (std::isfinite(t0)) {
      const double s = 1.0 - u;
      return {t0 + u / s, 1.0 / (s * s)};
    }
    if (std::isfinite(t1)) {
      const double s = 1.0 - u;
      return {t1 - u / s, 1.0 / (s * s)};
    }
    const double s = 1.0 - u * u;
    return {u / s, (1.0 + u * u) / (s * s)};
  }
};

struct Piece {
  double a;
  double b;
  double value;
  double error;
  double l1;
  unsigned depth;
  bool operator<(const Piece& other) const { return error < other.error; }
};

template <class G>
Piece gauss_kronrod_piece(const G& g, double a, double b, unsigned depth) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& x = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = gauss<double, 7>::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = g(mid);
  double kronrod = wk[0] * f0;
  double gauss_sum = wg[0] * f0;
  double l1 = wk[0] * std::abs(f0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fl = g(mid - half * x[i]);
    const double fr = g(mid + half * x[i]);
    kronrod += wk[i] * (fl + fr);
    l1 += wk[i] * (std::abs(fl) + std::abs(fr));
    if (i % 2 == 0) gauss_sum += wg[i / 2] * (fl + fr);
  }
  return {a, b, half * kronrod, std::abs(half * (kronrod - gauss_sum)), std::abs(half) * l1,
          depth};
}

}  // namespace

Quadrant integrate_radial(const RealFunction& f, double a, double b, SingularityHint hint,
                          std::span<const double> breakpoints,
                          const QuadratureOptions& options) {
  if (!(a >= 0.0) || !(b > a)) throw InputError("integrate_radial: need 0 <= a < b");

  const auto in_t = [&f](double t) {
    const double r = std::exp(t);
    // Beyond the double range the integrand contributes nothing measurable.
    if (r == 0.0 || std::isinf(r)) return 0.0;
    const double v = f(r);
    if (std::isnan(v)) {
      // inf * 0 far out in the tails (e.g. r^2 e^-r at r ~ 1e300)
      if (std::abs(t) > kTailLog) return 0.0;
      throw InputError("integrate_radial: integrand returned NaN");
    }
    return v * r;
  };

  const auto points = log_split_points(a, b, hint, breakpoints);
  std::vector<PieceMap> maps;
  struct Tagged {
    Piece piece;
    std::size_t map;
    bool operator<(const Tagged& o) const { return piece < o.piece; }
  };
  std::priority_queue<Tagged> heap;
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    maps.push_back({points[i], points[i + 1]});
  }
  const auto integrand_for = [&](std::size_t m) {
    return [&, m](double u) {
      const auto [t, jac] = maps[m](u);
      const double v = in_t(t);
      return v == 0.0 ? 0.0 : v * jac;
    };
  };
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const auto piece = gauss_kronrod_piece(integrand_for(m), maps[m].u_lo(), maps[m].u_hi(), 0);
    value += piece.value;
    error += piece.error;
    l1 += piece.l1;
    heap.push({piece, m});
  }

  const auto target = [&] {
    return std::max({options.abs_tol, options.rel_tol * std::abs(value), 50.0 * kEps * l1});
  };
  std::size_t pieces = heap.size();
  std::vector<Tagged> frozen;
  while (error > target() && !heap.empty() && pieces < options.max_pieces) {
    const auto top = heap.top();
    heap.pop();
    const Piece& p = top.piece;
    const double mid = 0.5 * (p.a + p.b);
    if (p.depth >= options.max_depth || !(mid > p.a && mid < p.b)) {
      frozen.push_back(top);
      continue;
    }
    const auto g = integrand_for(top.map);
    const auto left = gauss_kronrod_piece(g, p.a, mid, p.depth + 1);
    const auto right = gauss_kronrod_piece(g, mid, p.b, p.depth + 1);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    heap.push({left, top.map});
    heap.push({right, top.map});
    ++pieces;
  }

  // Re-sum from the final partition to shed the drift of running updates.
  value = 0.0;
  error = 0.0;
  l1 = 0.0;
  std::vector<Tagged> all(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) {
    return x.map != y.map ? x.map < y.map : x.piece.a < y.piece.a;
  });
  for (const auto& t : all) {
    value += t.piece.value;
    error += t.piece.error;
    l1 += t.piece.l1;
  }

  if (!std::isfinite(value)) {
    throw QuadratureError("integrate_radial: integral diverges", value, kInf);
  }
  // |K - G| overestimates the Kronrod error for smooth integrands; allow a
  // modest factor before declaring non-convergence.
  if (!(error <= 100.0 * target())) {
    throw QuadratureError("integrate_radial: tolerance not reached after maximal subdivision",
                          value, error);
  }
  return {value, std::max(error, kEps * std::abs(value))};
}

std::complex<double> integrate_radial_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    std::span<const double> breakpoints, const QuadratureOptions& options) {
  const double re =
      integrate_radial([&](double r) { return f(r).real(); }, a, b, SingularityHint::none,
                       breakpoints, options)
          .value;
  const double im =
      integrate_radial([&](double r) { return f(r).imag(); }, a, b, SingularityHint::none,
                       breakpoints, options)
          .value;
  return {re, im};
}

}  // namespace hardy::numerics
