#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/errors.hpp"
#include "hardy/numerics.hpp"
#include "hardy/potentials.hpp"

namespace hardy::potentials {

namespace {

using numerics::QuadratureOptions;
using numerics::SingularityHint;

constexpr QuadratureOptions kHardyQuadrature{1e-12, 1e-300, 20};

double channel_sup(const RadialWeight& weight, std::span<const ShellMeasure> shells, int k) {
  if (k == -1) throw InputError("channel k = -1 is not in the spectrum of sigma.L");
  if (weight.is_zero() && shells.empty()) return 0.0;
  numerics::SupSearchConfig config;
  config.breakpoints = weight.breakpoints();
  for (const auto& s : shells) config.breakpoints.push_back(s.radius);
  try {
    return numerics::sup_over_r([&](double r) { return channel_average(weight, shells, k, r); },
                                config)
        .value;
  } catch (const QuadratureError& e) {
    throw NotInClassA(std::string("not in class A: ") + e.what());
  }
}

}  // namespace

double channel_average(const RadialWeight& weight, std::span<const ShellMeasure> shells, int k,
                       double r) {
  if (k == -1) throw InputError("channel k = -1 is not in the spectrum of sigma.L");
  if (!(r > 0.0)) throw InputError("channel_average: r must be positive");
  const double e = 2.0 * (k + 1);
  const bool inner = k >= 0;

  double sum = 0.0;
  for (const auto& s : shells) {
    if (inner ? s.radius <= r : r <= s.radius) sum += s.mass * std::pow(s.radius / r, e);
  }
  if (weight.is_zero()) return sum;

  const auto bp = weight.breakpoints();
  const auto integrand = [&](double s) {
    const double w = weight(s);
    return w == 0.0 ? 0.0 : w * std::pow(s / r, e);
  };
  const auto q = inner ? numerics::integrate_radial(integrand, 0.0, r,
                                                    SingularityHint::inverse_r_at_0, bp,
                                                    kHardyQuadrature)
                       : numerics::integrate_radial(integrand, r,
                                                    std::numeric_limits<double>::infinity(),
                                                    SingularityHint::decay_at_inf, bp,
                                                    kHardyQuadrature);
  return sum + q.value;
}

double a_plus(const PotentialPair& pair) { return a_k(pair, 0); }

double a_minus(const PotentialPair& pair) { return a_k(pair, -2); }

double a_k(const PotentialPair& pair, int k) {
  return channel_sup(combined(pair.v1, pair.v2), pair.v1_shells, k);
}

TildeConstants tilde_constants(const PotentialPair& pair) {
  TildeConstants t;
  t.plus = channel_sup(pair.v1, pair.v1_shells, 0) + channel_sup(pair.v2, {}, 0);
  t.minus = channel_sup(pair.v1, pair.v1_shells, -2) + channel_sup(pair.v2, {}, -2);
  return t;
}

double HardyConstants::theorem_constant() const {
  return std::max(a_plus * a_plus, a_minus * a_minus);
}

double HardyConstants::channel(const PotentialPair& pair, int k) {
  if (k == 0) return a_plus;
  if (k == -2) return a_minus;
  if (const auto it = per_channel.find(k); it != per_channel.end()) return it->second;
  const double value = a_k(pair, k);
  per_channel.emplace(k, value);
  return value;
}

HardyConstants hardy_constants(const PotentialPair& pair, std::span<const int> channels) {
  pair.validate();
  HardyConstants c;
  c.a_plus = a_plus(pair);
  c.a_minus = a_minus(pair);
  const auto t = tilde_constants(pair);
  c.a_tilde_plus = t.plus;
  c.a_tilde_minus = t.minus;
  c.per_channel[0] = c.a_plus;
  c.per_channel[-2] = c.a_minus;
  for (int k : channels) c.channel(pair, k);
  return c;
}

void check_class_a(const PotentialPair& pair) {
  const double ap = a_plus(pair);
  const double am = a_minus(pair);
  if (!std::isfinite(ap) || !std::isfinite(am)) throw NotInClassA("Hardy constants not finite");
}

PotentialPair scale_pair(const PotentialPair& pair, double alpha) {
  if (!(alpha > 0.0)) throw InputError("scale_pair: alpha must be positive");
  PotentialPair out;
  out.v1 = pair.v1.scaled(alpha);
  out.v2 = pair.v2.scaled(alpha);
  out.c1 = pair.c1;
  out.c2 = pair.c2;
  for (const auto& s : pair.v1_shells) out.v1_shells.push_back({s.radius / alpha, s.mass});
  return out;
}

}  // namespace hardy::potentials
