#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/partial_waves.hpp"

namespace hardy::waves {

namespace {

double integrate_profile(const RadialProfile& f, const std::function<double(double)>& density,
                         std::span<const double> weight_breakpoints) {
  auto bps = f.breakpoints();
  bps.insert(bps.end(), weight_breakpoints.begin(), weight_breakpoints.end());
  numerics::QuadratureOptions options;
  options.max_pieces = 4000 + 4 * bps.size();
  return numerics::integrate_radial(density, f.support_lo(), f.support_hi(),
                                    numerics::SingularityHint::none, bps, options)
      .value;
}

}  // namespace

double channel_norm_weighted(const RadialProfile& f, const RealFunction& weight,
                             std::span<const double> weight_breakpoints) {
  if (f.kind() == RadialProfile::Kind::closed_form && f.terms().empty()) return 0.0;
  return integrate_profile(
      f,
      [&](double r) {
        // Checked first so that an infinite weight on a zero of f adds nothing.
        const double a = std::norm(f(r));
        if (a == 0.0) return 0.0;
        const double w = weight(r);
        return w == 0.0 ? 0.0 : w * a * r * r;
      },
      weight_breakpoints);
}

double channel_sigma_grad_norm_weighted(const RadialProfile& f, int k,
                                        const RealFunction& weight,
                                        std::span<const double> weight_breakpoints) {
  const auto d = radial_sigma_grad(f, Channel(k));
  return channel_norm_weighted(d, weight, weight_breakpoints);
}

double field_norm_weighted(const SpinorField& field, const RealFunction& weight,
                           std::span<const double> weight_breakpoints) {
  double sum = 0.0;
  for (const auto& [k, f] : field.terms()) sum += channel_norm_weighted(f, weight, weight_breakpoints);
  return sum;
}

double field_norm_weighted(const SpinorField& field,
                           std::span<const potentials::ShellMeasure> shells) {
  double sum = 0.0;
  for (const auto& [k, f] : field.terms()) {
    for (const auto& s : shells) sum += s.mass * s.radius * s.radius * std::norm(f(s.radius));
  }
  return sum;
}

double field_norm_weighted(const SpinorField& field, const potentials::RadialWeight& weight,
                           std::span<const potentials::ShellMeasure> shells) {
  double sum = 0.0;
  if (!weight.is_zero()) {
    const auto bps = weight.breakpoints();
    sum += field_norm_weighted(field, [&](double r) { return weight(r); }, bps);
  }
  return sum + field_norm_weighted(field, shells);
}

double field_norm(const SpinorField& field) {
  return field_norm_weighted(field, [](double) { return 1.0; });
}

double sigma_grad_norm_weighted(const SpinorField& field, const RealFunction& weight,
                                std::span<const double> weight_breakpoints) {
  double sum = 0.0;
  for (const auto& [k, f] : field.terms())
    sum += channel_sigma_grad_norm_weighted(f, k, weight, weight_breakpoints);
  return sum;
}

ChannelWeights channel_weights(const potentials::PotentialPair& pair, const Channel& channel) {
  const int k = channel.k();
  const auto total = potentials::combined(pair.v1, pair.v2);
  const auto shells = pair.v1_shells;
  auto bps = total.breakpoints();
  for (const auto& s : shells) bps.push_back(s.radius);

  ChannelWeights out;
  out.is_g = k >= 0;
  if (total.is_zero() && shells.empty()) return out;

  const auto g = [total, shells, k](double r) {
    return potentials::channel_average(total, shells, k, r);
  };
  out.g_or_h = RadialProfile::callable([g](double r) { return Complex(g(r)); }, {}, bps);
  // W_k = V1 + V2 - (2k/r) g_k (k >= 0), V1 + V2 + (2k/r) h_k (k <= -2)
  const double sign = k >= 0 ? -1.0 : 1.0;
  out.w = RadialProfile::callable(
      [total, g, k, sign](double r) { return Complex(total(r) + sign * 2.0 * k / r * g(r)); }, {},
      bps);
  return out;
}

std::array<Complex, 2> evaluate_spinor(const SpinorField& field, const std::array<double, 3>& x) {
  for (const auto& [k, f] : field.terms()) {
    if (k != 0 && k != -2)
      throw InputError("evaluate_spinor: only channels k = 0 and k = -2 are supported");
  }
  const double r = std::hypot(x[0], x[1], x[2]);
  if (!(r > 0.0)) throw InputError("evaluate_spinor: x must be nonzero");
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  std::array<Complex, 2> out{0.0, 0.0};
  const auto& terms = field.terms();
  if (const auto it = terms.find(0); it != terms.end()) out[0] += it->second(r) * norm;
  if (const auto it = terms.find(-2); it != terms.end()) {
    // (sigma.x/r) (1, 0) = (x3, x1 + i x2) / r
    const Complex f = it->second(r) * norm / r;
    out[0] += f * x[2];
    out[1] += f * Complex(x[0], x[1]);
  }
  return out;
}

}  // namespace hardy::waves
