#include <cmath>
#include <limits>

#include "hardy/errors.hpp"
#include "hardy/verifier.hpp"

namespace hardy::verifier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Quadrature failure on a nonnegative integrand is read as divergence.
template <class F>
double or_infinity(F&& compute) {
  try {
    return compute();
  } catch (const QuadratureError&) {
    return kInf;
  }
}

double channel_lhs(const PotentialPair& pair, const RadialProfile& f) {
  double sum = 0.0;
  for (const auto& s : pair.v1_shells) sum += s.mass * s.radius * s.radius * std::norm(f(s.radius));
  if (pair.v1.is_zero()) return sum;
  const auto bps = pair.v1.breakpoints();
  return sum + or_infinity([&] {
           return waves::channel_norm_weighted(f, [&](double r) { return pair.v1(r); }, bps);
         });
}

double channel_grad(const RadialProfile& f, int k, const waves::RealFunction& weight,
                    std::span<const double> bps) {
  return or_infinity([&] { return waves::channel_sigma_grad_norm_weighted(f, k, weight, bps); });
}

double channel_mass(const RadialProfile& f) {
  return or_infinity([&] { return waves::channel_norm_weighted(f, [](double) { return 1.0; }); });
}

// Fills lhs, rhs, ratio and the flags from the per-channel entries.
void finish(InequalityReport& report) {
  report.lhs = 0.0;
  report.rhs = 0.0;
  for (const auto& [k, c] : report.per_channel) {
    report.lhs += c.lhs;
    report.rhs += c.rhs;
  }
  report.lhs_infinite = std::isinf(report.lhs);
  if (std::isinf(report.rhs)) {
    report.vacuous = true;
    report.ratio = 0.0;
    report.satisfied = true;
    return;
  }
  if (report.lhs == 0.0) {
    report.ratio = 0.0;
  } else if (report.rhs == 0.0) {
    report.ratio = kInf;
  } else {
    report.ratio = report.lhs / report.rhs;
  }
  report.satisfied = report.ratio <= 1.0 + report.tolerance;
}

bool within(double lhs, double rhs, double tolerance) {
  if (std::isinf(rhs)) return true;
  return lhs <= rhs * (1.0 + tolerance);
}

}  // namespace

void GapParameters::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InputError("mass m must be positive and finite");
  if (!(lambda > -m && lambda < m)) throw InputError("lambda must lie in (-m, m)");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be >= 0");
}

double hardy_lhs(const PotentialPair& pair, const SpinorField& field) {
  double sum = 0.0;
  for (const auto& [k, f] : field.terms()) sum += channel_lhs(pair, f);
  return sum;
}

double hardy_rhs_theorem(const PotentialPair& pair, const SpinorField& field, double gamma) {
  auto constants = potentials::hardy_constants(pair);
  return verify_theorem(pair, constants, field, gamma).rhs;
}

InequalityReport verify_theorem(const PotentialPair& pair, const SpinorField& field, double gamma,
                                double tolerance) {
  auto constants = potentials::hardy_constants(pair);
  return verify_theorem(pair, constants, field, gamma, tolerance);
}

InequalityReport verify_theorem(const PotentialPair& pair, potentials::HardyConstants& constants,
                                const SpinorField& field, double gamma, double tolerance) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be >= 0");
  if (gamma == 0.0 && pair.v2.is_zero())
    throw InputError("gamma = 0 requires V2 > 0; V2 is identically zero");

  InequalityReport report;
  report.tolerance = tolerance;
  report.constant = constants.theorem_constant();
  const auto bps = pair.v2.breakpoints();
  const waves::RealFunction weight = [&](double r) {
    const double d = pair.v2(r) + gamma;
    return d > 0.0 ? 1.0 / d : kInf;
  };
  for (const auto& [k, f] : field.terms()) {
    ChannelTerms c;
    c.lhs = channel_lhs(pair, f);
    c.mass = channel_mass(f);
    // Skip the gradient integral when its coefficient vanishes.
    c.grad = report.constant == 0.0 ? 0.0 : channel_grad(f, k, weight, bps);
    c.rhs = report.constant * c.grad + gamma * c.mass;
    c.a_k = constants.channel(pair, k);
    const double sharp = c.a_k * c.a_k;
    c.rhs_sharp = (sharp == 0.0 ? 0.0 : sharp * c.grad) + gamma * c.mass;
    c.satisfied = within(c.lhs, c.rhs_sharp, tolerance);
    report.per_channel.emplace(k, c);
  }
  finish(report);
  return report;
}

double select_lambda(double c1, double c2, double m) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw InputError("select_lambda: c1 and c2 must be positive");
  if (!(m > 0.0)) throw InputError("select_lambda: m must be positive");
  const double lambda_min = std::max(0.0, m * (c1 - c2) / (c1 + c2));
  return 0.5 * (lambda_min + m);
}

double check_corollary_hypothesis(const PotentialPair& pair,
                                  const potentials::HardyConstants& constants) {
  const double c = constants.theorem_constant();
  const double threshold = c > 0.0 ? 1.0 / c : kInf;
  const double product = pair.c1 * pair.c2;
  if (product > threshold * (1.0 + 1e-12)) {
    throw HypothesisError("hypothesis violated: c1*c2 = " + std::to_string(product) +
                          " exceeds 1/max{A+^2, A-^2} = " + std::to_string(threshold));
  }
  return threshold;
}

CorollaryReport verify_corollary(const PotentialPair& pair, const SpinorField& field, double m,
                                 std::optional<double> lambda, double tolerance) {
  auto constants = potentials::hardy_constants(pair);
  return verify_corollary(pair, constants, field, m, lambda, tolerance);
}

CorollaryReport verify_corollary(const PotentialPair& pair, potentials::HardyConstants& constants,
                                 const SpinorField& field, double m,
                                 std::optional<double> lambda, double tolerance) {
  const double c1 = pair.c1;
  const double c2 = pair.c2;
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw InputError("c1 and c2 must be positive");
  CorollaryReport report;
  report.threshold = check_corollary_hypothesis(pair, constants);
  report.m = m;
  report.lambda = lambda ? *lambda : select_lambda(c1, c2, m);
  GapParameters{m, report.lambda, 0.0}.validate();
  report.tolerance = tolerance;
  report.constant = 1.0;

  const auto bps = pair.v2.breakpoints();
  const auto weight_for = [&](double lam) {
    return waves::RealFunction([&pair, m, c2, lam](double r) {
      return 1.0 / (m + c2 * pair.v2(r) - lam);
    });
  };
  const double lam = report.lambda;
  const double theorem_c = constants.theorem_constant();
  double v1_total = 0.0;
  double mass_total = 0.0;
  for (const auto& [k, f] : field.terms()) {
    ChannelTerms c;
    const double v1_term = channel_lhs(pair, f);
    v1_total += v1_term;
    c.lhs = c1 * v1_term;
    c.mass = channel_mass(f);
    mass_total += c.mass;
    c.grad = channel_grad(f, k, weight_for(lam), bps);
    c.rhs = c.grad + (m + lam) * c.mass;
    // Channel version of the proof: theorem with gamma = (m - lambda) / c2.
    c.a_k = constants.channel(pair, k);
    c.rhs_sharp = c1 * c2 * c.a_k * c.a_k * c.grad + c1 * (m - lam) / c2 * c.mass;
    c.satisfied = within(c.lhs, c.rhs_sharp, tolerance);
    report.per_channel.emplace(k, c);
  }
  finish(report);

  const double product = c1 * c2 * theorem_c;
  if (product > 0.0 && product < 1.0 - 1e-12 && std::isfinite(v1_total)) {
    auto& ne = report.norm_equivalence;
    ne.evaluated = true;
    ne.epsilon = 1.0 / product - 1.0;
    ne.lambda = select_lambda((1.0 + ne.epsilon) * c1, c2, m);
    double grad = 0.0;
    for (const auto& [k, f] : field.terms()) grad += channel_grad(f, k, weight_for(ne.lambda), bps);
    ne.lhs = ne.epsilon * c1 * v1_total;
    ne.rhs = grad + (m + ne.lambda) * mass_total - c1 * v1_total;
    ne.satisfied = within(ne.lhs, ne.rhs, tolerance);
  }
  return report;
}

}  // namespace hardy::verifier
