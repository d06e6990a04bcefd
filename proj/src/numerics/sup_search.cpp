#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"

namespace hardy::numerics {

std::string_view to_string(SupLocation location) {
  switch (location) {
    case SupLocation::interior:
      return "interior";
    case SupLocation::at_zero:
      return "r->0";
    case SupLocation::at_infinity:
      return "r->inf";
  }
  return "unknown";
}

namespace {

double checked(const RealFunction& g, double r) {
  const double v = g(r);
  if (std::isnan(v)) throw InputError("sup_over_r: function returned NaN");
  if (std::isinf(v)) {
    if (v > 0) throw NotInClassA("sup_over_r: function is unbounded (infinite value)");
    return -std::numeric_limits<double>::infinity();
  }
  return v;
}

// Golden-section maximization in u = ln r on [u_lo, u_hi].
std::pair<double, double> golden_max(const RealFunction& g, double u_lo, double u_hi,
                                     int rounds) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = u_lo;
  double b = u_hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = checked(g, std::exp(c));
  double fd = checked(g, std::exp(d));
  for (int i = 0; i < rounds && (b - a) > 1e-13; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = checked(g, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = checked(g, std::exp(d));
    }
  }
  return fc >= fd ? std::pair{std::exp(c), fc} : std::pair{std::exp(d), fd};
}

struct TailProbe {
  bool increasing = false;
  double limit = 0.0;
  double last_r = 0.0;
  double best_r = 0.0;
};

// Probes g at r_edge * step^i. Reports whether g keeps increasing toward the
// limit and, if so, an extrapolated limit; throws when growth does not saturate.
TailProbe probe_tail(const RealFunction& g, double r_edge, double edge_value, double step,
                     int decades, double scale, double rel_tol) {
  TailProbe probe;
  std::vector<double> values{edge_value};
  std::vector<double> radii{r_edge};
  double r = r_edge;
  for (int i = 0; i < decades; ++i) {
    r *= step;
    values.push_back(checked(g, r));
    radii.push_back(r);
  }
  probe.last_r = r;
  const double growth_floor = rel_tol * std::max(1.0, scale);

  // Require strict growth across the last three probes before calling it a tail sup.
  const std::size_t n = values.size();
  const double d1 = values[n - 2] - values[n - 3];
  const double d2 = values[n - 1] - values[n - 2];
  if (!(d1 > growth_floor && d2 > growth_floor)) {
    const auto it = std::max_element(values.begin(), values.end());
    probe.limit = *it;
    probe.best_r = radii[static_cast<std::size_t>(it - values.begin())];
    probe.increasing = false;
    return probe;
  }
  const double ratio = d2 / d1;
  if (ratio >= 0.5) {
    throw NotInClassA("sup_over_r: unbounded growth toward the boundary");
  }
  probe.increasing = true;
  probe.limit = values[n - 1] + d2 * ratio / (1.0 - ratio);
  return probe;
}

}  // namespace

SupResult sup_over_r(const RealFunction& g, const SupSearchConfig& config) {
  if (!(config.r_lo > 0.0) || !(config.r_hi > config.r_lo) || config.points_per_decade < 1 ||
      config.tail_decades < 2) {
    throw InputError("sup_over_r: bad search configuration");
  }
  const double u_lo = std::log(config.r_lo);
  const double u_hi = std::log(config.r_hi);
  const int n = std::max(
      3, static_cast<int>(std::ceil((u_hi - u_lo) / std::log(10.0) * config.points_per_decade)) +
             1);
  const double du = (u_hi - u_lo) / (n - 1);

  std::vector<double> us(n);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    us[i] = u_lo + du * i;
    values[i] = checked(g, std::exp(us[i]));
  }

  const auto best_it = std::max_element(values.begin(), values.end());
  const auto best = static_cast<int>(best_it - values.begin());
  SupResult result{values[best], std::exp(us[best]), SupLocation::interior};

  if (best > 0 && best < n - 1) {
    const auto [r_star, v_star] = golden_max(g, us[best - 1], us[best + 1], config.refinement_rounds);
    if (v_star > result.value) result = {v_star, r_star, SupLocation::interior};
  }

  for (double bp : config.breakpoints) {
    if (!(bp > 0.0)) continue;
    const double v = checked(g, bp);
    if (v > result.value) result = {v, bp, SupLocation::interior};
  }

  const double scale = std::abs(result.value);
  const double tol = config.rel_tol * std::max(1.0, scale);

  const auto low = probe_tail(g, config.r_lo, values.front(), 0.1, config.tail_decades, scale,
                              config.rel_tol);
  if (low.increasing && low.limit > result.value + tol) {
    result = {low.limit, 0.0, SupLocation::at_zero};
  } else if (low.limit > result.value) {
    result = {low.limit, low.best_r, SupLocation::interior};
  }
  const auto high = probe_tail(g, config.r_hi, values.back(), 10.0, config.tail_decades, scale,
                               config.rel_tol);
  if (high.increasing && high.limit > result.value + tol) {
    result = {high.limit, std::numeric_limits<double>::infinity(), SupLocation::at_infinity};
  } else if (high.limit > result.value) {
    result = {high.limit, high.best_r, SupLocation::interior};
  }
  return result;
}

}  // namespace hardy::numerics
