#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/dirac.hpp"
#include "hardy/errors.hpp"
#include "hardy/verifier.hpp"

namespace hardy::dirac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> merged_breakpoints(const RadialProfile& a, const RadialProfile& b,
                                       const DiracChannelProblem& problem) {
  auto bps = a.breakpoints();
  const auto bb = b.breakpoints();
  bps.insert(bps.end(), bb.begin(), bb.end());
  const auto wb = problem.weight_breakpoints();
  bps.insert(bps.end(), wb.begin(), wb.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

Complex integrate_over(const std::function<Complex(double)>& f, double lo, double hi,
                       std::span<const double> bps) {
  if (!(hi > lo)) return 0.0;
  numerics::QuadratureOptions options;
  options.max_pieces = 4000 + 4 * bps.size();
  return numerics::integrate_radial_complex(f, lo, hi, bps, options);
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::w1_nonpositive:
      return "w1_nonpositive";
    case Regime::w1_nonnegative:
      return "w1_nonnegative";
    case Regime::measure:
      return "measure";
  }
  return "unknown";
}

DiracChannelProblem::DiracChannelProblem(potentials::PotentialPair pair_, int k, double m_,
                                         double lambda_, numerics::RadialGrid grid_, int degree_)
    : pair(std::move(pair_)), channel(k), m(m_), lambda(lambda_), grid(std::move(grid_)),
      degree(degree_) {}

std::vector<std::pair<double, double>> DiracChannelProblem::shell_terms() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : pair.v1_shells)
    out.emplace_back(s.radius, pair.c1 * s.mass * s.radius * s.radius);
  return out;
}

std::vector<double> DiracChannelProblem::weight_breakpoints() const {
  auto bps = pair.v1.breakpoints();
  const auto b2 = pair.v2.breakpoints();
  bps.insert(bps.end(), b2.begin(), b2.end());
  for (const auto& s : pair.v1_shells) bps.push_back(s.radius);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

double DiracChannelProblem::theorem_constant() const {
  if (!theorem_constant_) theorem_constant_ = potentials::hardy_constants(pair).theorem_constant();
  return *theorem_constant_;
}

Regime DiracChannelProblem::regime() const {
  pair.validate();
  if (pair.c2 < 0.0) throw HypothesisError("w2 = c2 V2 must be nonnegative (c2 >= 0)");
  const bool w1_trivial = pair.c1 <= 0.0 || (pair.v1.is_zero() && pair.v1_shells.empty());
  if (w1_trivial) {
    if (pair.c1 < 0.0 && pair.has_shells())
      throw HypothesisError("negative shell masses in w1 are not covered");
    return Regime::w1_nonpositive;
  }
  const double c = theorem_constant();
  const double product = pair.c1 * pair.c2;
  if (c > 0.0 && !(product * c < 1.0)) {
    throw HypothesisError("hypothesis violated: c1*c2 = " + std::to_string(product) +
                          " is not below 1/max{A+^2, A-^2} = " + std::to_string(1.0 / c));
  }
  return pair.has_shells() ? Regime::measure : Regime::w1_nonnegative;
}

Regime DiracChannelProblem::validate() const {
  verifier::GapParameters{m, lambda, 0.0}.validate();
  if (degree < 1 || degree > 8) throw InputError("finite element degree must be in 1..8");
  return regime();
}

double default_lambda(const potentials::PotentialPair& pair, double m) {
  if (pair.c1 > 0.0 && pair.c2 > 0.0) return verifier::select_lambda(pair.c1, pair.c2, m);
  return 0.5 * m;
}

Complex h_inner_product(const RadialProfile& phi1, const RadialProfile& phi2,
                        const DiracChannelProblem& problem) {
  const int k = problem.channel.k();
  const double lo = std::max(phi1.support_lo(), phi2.support_lo());
  const double hi = std::min(phi1.support_hi(), phi2.support_hi());
  const auto bps = merged_breakpoints(phi1, phi2, problem);
  const double m = problem.m;
  const double lam = problem.lambda;
  Complex value;
  try {
    value = integrate_over(
        [&](double r) {
          const Complex a = phi1(r);
          const Complex b = phi2(r);
          const Complex da = phi1.derivative(r) - static_cast<double>(k) * a / r;
          const Complex db = phi2.derivative(r) - static_cast<double>(k) * b / r;
          Complex s = 0.0;
          if (a != 0.0 && b != 0.0) s += (m - problem.w1(r) + lam) * a * std::conj(b);
          if (da != 0.0 && db != 0.0) s += da * std::conj(db) / (m + problem.w2(r) - lam);
          return s * r * r;
        },
        lo, hi, bps);
  } catch (const QuadratureError& e) {
    throw HypothesisError(std::string("not in H: ") + e.what());
  }
  for (const auto& [radius, weight] : problem.shell_terms())
    value -= weight * phi1(radius) * std::conj(phi2(radius));
  return value;
}

double comparison_norm_squared(const RadialProfile& phi, const DiracChannelProblem& problem) {
  const int k = problem.channel.k();
  const auto bps = merged_breakpoints(phi, phi, problem);
  const double m = problem.m;
  const double lam = problem.lambda;
  try {
    return integrate_over(
               [&](double r) {
                 const Complex a = phi(r);
                 const Complex da = phi.derivative(r) - static_cast<double>(k) * a / r;
                 return Complex((std::norm(da) / (m + problem.w2(r) - lam) +
                                 (m + lam) * std::norm(a)) *
                                r * r);
               },
               phi.support_lo(), phi.support_hi(), bps)
        .real();
  } catch (const QuadratureError& e) {
    throw HypothesisError(std::string("not in H: ") + e.what());
  }
}

NormEquivalence norm_equivalence_probe(const DiracChannelProblem& problem,
                                       std::span<const RadialProfile> gallery) {
  if (gallery.empty()) throw InputError("norm_equivalence_probe: empty gallery");
  NormEquivalence out;
  out.c_low = kInf;
  out.c_high = -kInf;
  for (const auto& phi : gallery) {
    const double comparison = comparison_norm_squared(phi, problem);
    if (!(comparison > 0.0)) throw InputError("norm_equivalence_probe: zero profile in gallery");
    const double ratio = h_inner_product(phi, phi, problem).real() / comparison;
    out.c_low = std::min(out.c_low, ratio);
    out.c_high = std::max(out.c_high, ratio);
  }
  out.regime_ok = out.c_low > 0.0 && std::isfinite(out.c_high);
  return out;
}

AppliedH apply_H(const DiracChannelProblem& problem, const RadialProfile& phi,
                 const RadialProfile& chi) {
  if (!phi.differentiable() || !chi.differentiable())
    throw InputError("apply_H: profiles must be differentiable");
  const double k = problem.channel.k();
  const double m = problem.m;
  const double lam = problem.lambda;
  auto bps = merged_breakpoints(phi, chi, problem);
  const double lo = std::min(phi.support_lo(), chi.support_lo());
  const double hi = std::max(phi.support_hi(), chi.support_hi());
  // Copies keep the profiles alive inside the returned callables.
  const auto pr = std::make_shared<const DiracChannelProblem>(problem);
  AppliedH out;
  out.upper = RadialProfile::callable(
      [pr, phi, chi, m, lam, k](double r) {
        return (m - pr->w1(r) + lam) * phi(r) + chi.derivative(r) + (k + 2.0) * chi(r) / r;
      },
      {}, bps, lo, hi);
  out.lower = RadialProfile::callable(
      [pr, phi, chi, m, lam, k](double r) {
        return -(phi.derivative(r) - k * phi(r) / r) + (-m - pr->w2(r) + lam) * chi(r);
      },
      {}, bps, lo, hi);
  for (const auto& [radius, weight] : problem.shell_terms())
    out.shell_charges.push_back({radius, weight * phi(radius)});
  return out;
}

}  // namespace hardy::dirac
