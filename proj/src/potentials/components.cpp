#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "hardy/errors.hpp"
#include "hardy/potentials.hpp"

namespace hardy::potentials {

namespace {

double raw_bump(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double bump_mass() {
  static const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      raw_bump, -1.0, 1.0, 20, 1e-14);
  return mass;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double bump(double t) { return raw_bump(t) / bump_mass(); }

PotentialComponent::PotentialComponent(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const Zero&) {},
                 [](const Coulomb& c) {
                   if (!std::isfinite(c.nu)) throw InputError("coulomb: non-finite strength");
                 },
                 [](const Power& p) {
                   if (!std::isfinite(p.a) || !std::isfinite(p.p))
                     throw InputError("power: non-finite parameter");
                 },
                 [](const Table& t) {
                   if (!t.r || !t.value || t.r->size() != t.value->size() || t.r->size() < 2)
                     throw InputError("table: need at least two (r, value) rows");
                   for (std::size_t i = 0; i < t.r->size(); ++i) {
                     if (!std::isfinite((*t.value)[i]) || !((*t.r)[i] >= 0.0))
                       throw InputError("table: invalid row");
                     if (i > 0 && !((*t.r)[i] > (*t.r)[i - 1]))
                       throw InputError("table: abscissae must be strictly increasing");
                   }
                 },
                 [](const MollifiedShell& m) {
                   if (!(m.eps > 0.0) || !(m.radius > 0.0) || !std::isfinite(m.c))
                     throw InputError("mshell: need eps > 0 and R > 0");
                   if (m.eps > m.radius) throw InputError("mshell: support must not reach r < 0");
                 },
             },
             kind_);
}

double PotentialComponent::operator()(double r) const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [r](const Coulomb& c) { return c.nu / r; },
          [r](const Power& p) { return p.a * std::pow(r, p.p); },
          [r](const Table& t) {
            const auto& xs = *t.r;
            const auto& ys = *t.value;
            if (r < xs.front() || r > xs.back()) return 0.0;
            const auto it = std::upper_bound(xs.begin(), xs.end(), r);
            if (it == xs.end()) return ys.back();
            const auto i = static_cast<std::size_t>(it - xs.begin());
            const double w = (r - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return (1.0 - w) * ys[i - 1] + w * ys[i];
          },
          [r](const MollifiedShell& m) { return m.c / m.eps * bump((r - m.radius) / m.eps); },
      },
      kind_);
}

std::vector<double> PotentialComponent::breakpoints() const {
  return std::visit(overloaded{
                        [](const Table& t) { return *t.r; },
                        [](const MollifiedShell& m) {
                          std::vector<double> bp{m.radius};
                          if (m.radius - m.eps > 0.0) bp.push_back(m.radius - m.eps);
                          bp.push_back(m.radius + m.eps);
                          return bp;
                        },
                        [](const auto&) { return std::vector<double>{}; },
                    },
                    kind_);
}

bool PotentialComponent::is_zero() const {
  return std::visit(overloaded{
                        [](const Zero&) { return true; },
                        [](const Coulomb& c) { return c.nu == 0.0; },
                        [](const Power& p) { return p.a == 0.0; },
                        [](const Table& t) {
                          return std::all_of(t.value->begin(), t.value->end(),
                                             [](double v) { return v == 0.0; });
                        },
                        [](const MollifiedShell& m) { return m.c == 0.0; },
                    },
                    kind_);
}

bool PotentialComponent::is_nonnegative_weight() const {
  return std::visit(overloaded{
                        [](const Zero&) { return true; },
                        [](const Coulomb& c) { return c.nu >= 0.0; },
                        [](const Power& p) { return p.a >= 0.0; },
                        [](const Table& t) {
                          return std::all_of(t.value->begin(), t.value->end(),
                                             [](double v) { return v >= 0.0; });
                        },
                        [](const MollifiedShell& m) { return m.c >= 0.0; },
                    },
                    kind_);
}

PotentialComponent PotentialComponent::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw InputError("scaling factor must be positive");
  return PotentialComponent(std::visit(
      overloaded{
          [](const Zero& z) -> Kind { return z; },
          [](const Coulomb& c) -> Kind { return c; },
          [alpha](const Power& p) -> Kind { return Power{std::pow(alpha, 1.0 + p.p) * p.a, p.p}; },
          [alpha](const Table& t) -> Kind {
            auto r = std::make_shared<std::vector<double>>(*t.r);
            auto v = std::make_shared<std::vector<double>>(*t.value);
            for (auto& x : *r) x /= alpha;
            for (auto& y : *v) y *= alpha;
            return Table{t.source, std::move(r), std::move(v)};
          },
          [alpha](const MollifiedShell& m) -> Kind {
            return MollifiedShell{m.c, m.eps / alpha, m.radius / alpha};
          },
      },
      kind_));
}

RadialWeight::RadialWeight(std::vector<PotentialComponent> terms) : terms_(std::move(terms)) {}

RadialWeight RadialWeight::coulomb(double nu) {
  return RadialWeight({PotentialComponent(Coulomb{nu})});
}

double RadialWeight::operator()(double r) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += t(r);
  return sum;
}

std::vector<double> RadialWeight::breakpoints() const {
  std::vector<double> out;
  for (const auto& t : terms_) {
    const auto bp = t.breakpoints();
    out.insert(out.end(), bp.begin(), bp.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool RadialWeight::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.is_zero(); });
}

RadialWeight RadialWeight::scaled(double alpha) const {
  std::vector<PotentialComponent> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.scaled(alpha));
  return RadialWeight(std::move(out));
}

void PotentialPair::validate() const {
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2))
    throw InputError("coupling constants c1, c2 must be finite and nonnegative");
  for (const auto& t : v1.terms()) {
    if (!t.is_nonnegative_weight()) throw InputError("V1 must be a nonnegative weight");
  }
  for (const auto& t : v2.terms()) {
    if (!t.is_nonnegative_weight()) throw InputError("V2 must be a nonnegative weight");
  }
  for (const auto& s : v1_shells) {
    if (!(s.radius > 0.0) || !(s.mass > 0.0) || !std::isfinite(s.radius) || !std::isfinite(s.mass))
      throw InputError("shell measure needs radius > 0 and mass > 0");
    // V2 has to stay bounded on a neighbourhood of the shell.
    for (int i = -5; i <= 5; ++i) {
      const double v = v2(s.radius * (1.0 + 0.01 * i));
      if (!std::isfinite(v) || v > 1e12)
        throw HypothesisError("V2 is not bounded near the shell radius " +
                              std::to_string(s.radius));
    }
  }
}

RadialWeight combined(const RadialWeight& a, const RadialWeight& b) {
  std::vector<PotentialComponent> terms(a.terms().begin(), a.terms().end());
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return RadialWeight(std::move(terms));
}

}  // namespace hardy::potentials
