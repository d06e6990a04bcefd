#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardy/errors.hpp"
#include "hardy/partial_waves.hpp"

namespace hardy::waves {

Channel::Channel(int k) : k_(k) {
  if (k == -1) throw InputError("channel k = -1 is not in the spectrum of sigma.L");
}

struct RadialProfile::Sampled {
  numerics::RadialGrid grid;
  std::vector<double> t;       // ln r at the nodes
  std::vector<Complex> value;  // f
  std::vector<Complex> dt;     // df/dt
};

struct RadialProfile::Callable {
  ComplexFunction value;
  ComplexFunction derivative;
  std::vector<double> breakpoints;
  double lo;
  double hi;
};

namespace {

// Weights of the derivative at x0 of the Lagrange interpolant through xs.
std::array<double, 5> derivative_weights(const std::array<double, 5>& xs, double x0) {
  std::array<double, 5> w{};
  for (std::size_t j = 0; j < 5; ++j) {
    double denom = 1.0;
    for (std::size_t l = 0; l < 5; ++l)
      if (l != j) denom *= xs[j] - xs[l];
    double numer = 0.0;
    for (std::size_t m = 0; m < 5; ++m) {
      if (m == j) continue;
      double prod = 1.0;
      for (std::size_t l = 0; l < 5; ++l)
        if (l != j && l != m) prod *= x0 - xs[l];
      numer += prod;
    }
    w[j] = numer / denom;
  }
  return w;
}

// First index of a window of `width` consecutive nodes centred on i.
std::size_t window_start(std::size_t i, std::size_t n, std::size_t width) {
  const std::size_t half = width / 2;
  if (i < half) return 0;
  if (i + width - half > n) return n - width;
  return i - half;
}

Complex cubic(std::span<const double> t, std::span<const Complex> v, double x) {
  // Interval containing x, then a 4-point stencil around it.
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
  i = std::min(i, t.size() - 2);
  const std::size_t s = i == 0 ? 0 : std::min(i - 1, t.size() - 4);
  Complex sum = 0.0;
  for (std::size_t j = s; j < s + 4; ++j) {
    double basis = 1.0;
    for (std::size_t l = s; l < s + 4; ++l)
      if (l != j) basis *= (x - t[l]) / (t[j] - t[l]);
    sum += basis * v[j];
  }
  return sum;
}

Complex term_value(const ExpTerm& term, double r) {
  const double e = term.p * std::log(r) - term.a * (term.q == 1 ? r : r * r);
  return term.c * std::exp(e);
}

}  // namespace

RadialProfile::RadialProfile() = default;

RadialProfile RadialProfile::closed_form(std::vector<ExpTerm> terms) {
  RadialProfile out;
  for (const auto& t : terms) {
    if (t.q != 1 && t.q != 2) throw InputError("closed-form profile: q must be 1 or 2");
    if (!std::isfinite(t.p) || !std::isfinite(t.a) || !std::isfinite(t.c.real()) ||
        !std::isfinite(t.c.imag())) {
      throw InputError("closed-form profile: non-finite parameter");
    }
    if (t.a < 0.0) throw InputError("closed-form profile: decay rate must be >= 0");
    if (t.c != 0.0) out.terms_.push_back(t);
  }
  return out;
}

RadialProfile RadialProfile::exp(double p, double a, Complex c) {
  return closed_form({ExpTerm{c, p, a, 1}});
}

RadialProfile RadialProfile::gauss(double p, double a, Complex c) {
  return closed_form({ExpTerm{c, p, a, 2}});
}

RadialProfile RadialProfile::power(double p, Complex c) {
  return closed_form({ExpTerm{c, p, 0.0, 1}});
}

RadialProfile RadialProfile::sampled(numerics::RadialGrid grid, std::vector<Complex> values) {
  const std::size_t n = grid.size();
  if (values.size() != n) throw InputError("sampled profile: value count differs from grid size");
  if (n < 5) throw InputError("sampled profile: need at least 5 nodes");
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InputError("sampled profile: non-finite sample");
  }
  auto s = std::make_shared<Sampled>(Sampled{grid, {}, {}, {}});
  s->t.reserve(n);
  for (double r : grid.nodes()) s->t.push_back(std::log(r));
  s->dt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w0 = window_start(i, n, 5);
    std::array<double, 5> xs{};
    for (std::size_t j = 0; j < 5; ++j) xs[j] = s->t[w0 + j];
    const auto w = derivative_weights(xs, s->t[i]);
    Complex d = 0.0;
    for (std::size_t j = 0; j < 5; ++j) d += w[j] * values[w0 + j];
    s->dt[i] = d;
  }
  s->value = std::move(values);
  RadialProfile out;
  out.sampled_ = std::move(s);
  return out;
}

RadialProfile RadialProfile::callable(ComplexFunction value, ComplexFunction derivative,
                                      std::vector<double> breakpoints, double support_lo,
                                      double support_hi) {
  if (!value) throw InputError("callable profile: empty function");
  if (!(support_lo >= 0.0) || !(support_hi > support_lo))
    throw InputError("callable profile: invalid support");
  RadialProfile out;
  out.callable_ = std::make_shared<Callable>(
      Callable{std::move(value), std::move(derivative), std::move(breakpoints), support_lo,
               support_hi});
  return out;
}

RadialProfile::Kind RadialProfile::kind() const noexcept {
  if (sampled_) return Kind::sampled;
  if (callable_) return Kind::callable;
  return Kind::closed_form;
}

Complex RadialProfile::operator()(double r) const {
  if (!(r > 0.0)) throw InputError("profile evaluated at r <= 0");
  if (sampled_) {
    const auto& s = *sampled_;
    if (r < s.grid.r_min() || r > s.grid.r_max()) return 0.0;
    return cubic(s.t, s.value, std::log(r));
  }
  if (callable_) {
    if (r < callable_->lo || r > callable_->hi) return 0.0;
    return callable_->value(r);
  }
  Complex sum = 0.0;
  for (const auto& t : terms_) sum += term_value(t, r);
  return sum;
}

Complex RadialProfile::derivative(double r) const {
  if (!(r > 0.0)) throw InputError("profile derivative at r <= 0");
  if (sampled_) {
    const auto& s = *sampled_;
    if (r < s.grid.r_min() || r > s.grid.r_max()) return 0.0;
    return cubic(s.t, s.dt, std::log(r)) / r;
  }
  if (callable_) {
    if (!callable_->derivative) throw InputError("profile is not differentiable");
    if (r < callable_->lo || r > callable_->hi) return 0.0;
    return callable_->derivative(r);
  }
  Complex sum = 0.0;
  for (const auto& t : terms_) {
    const double rq1 = t.q == 1 ? 1.0 : r;  // r^{q-1}
    sum += term_value(t, r) * (t.p / r - t.a * t.q * rq1);
  }
  return sum;
}

bool RadialProfile::differentiable() const {
  return !callable_ || static_cast<bool>(callable_->derivative);
}

std::vector<double> RadialProfile::breakpoints() const {
  if (sampled_) {
    const auto nodes = sampled_->grid.nodes();
    return {nodes.begin(), nodes.end()};
  }
  if (callable_) {
    auto out = callable_->breakpoints;
    if (callable_->lo > 0.0) out.push_back(callable_->lo);
    if (std::isfinite(callable_->hi)) out.push_back(callable_->hi);
    return out;
  }
  return {};
}

double RadialProfile::support_lo() const {
  if (sampled_) return sampled_->grid.r_min();
  if (callable_) return callable_->lo;
  return 0.0;
}

double RadialProfile::support_hi() const {
  if (sampled_) return sampled_->grid.r_max();
  if (callable_) return callable_->hi;
  return std::numeric_limits<double>::infinity();
}

bool RadialProfile::has_finite_norm() const {
  if (kind() != Kind::closed_form) return true;
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const ExpTerm& t) { return t.p > -1.5 && t.a > 0.0; });
}

double RadialProfile::norm_squared() const {
  return channel_norm_weighted(*this, [](double) { return 1.0; });
}

RadialProfile RadialProfile::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw InputError("profile dilation: alpha must be positive");
  const double amp = std::pow(alpha, 1.5);
  if (sampled_) {
    std::vector<double> nodes;
    for (double r : sampled_->grid.nodes()) nodes.push_back(r / alpha);
    std::vector<Complex> values;
    for (const auto& v : sampled_->value) values.push_back(amp * v);
    return sampled(numerics::RadialGrid::from_nodes(std::move(nodes),
                                                    sampled_->grid.transform()),
                   std::move(values));
  }
  if (callable_) {
    const auto c = callable_;
    ComplexFunction d;
    if (c->derivative) d = [c, alpha, amp](double r) { return amp * alpha * c->derivative(alpha * r); };
    std::vector<double> bps;
    for (double b : c->breakpoints) bps.push_back(b / alpha);
    return callable([c, alpha, amp](double r) { return amp * c->value(alpha * r); }, d,
                    std::move(bps), c->lo / alpha, c->hi / alpha);
  }
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    out.push_back({t.c * amp * std::pow(alpha, t.p), t.p,
                   t.a * (t.q == 1 ? alpha : alpha * alpha), t.q});
  }
  return closed_form(std::move(out));
}

RadialProfile RadialProfile::scaled_by(Complex factor) const {
  if (sampled_) {
    std::vector<Complex> values;
    for (const auto& v : sampled_->value) values.push_back(factor * v);
    return sampled(sampled_->grid, std::move(values));
  }
  if (callable_) {
    const auto c = callable_;
    ComplexFunction d;
    if (c->derivative) d = [c, factor](double r) { return factor * c->derivative(r); };
    return callable([c, factor](double r) { return factor * c->value(r); }, d, c->breakpoints,
                    c->lo, c->hi);
  }
  auto out = terms_;
  for (auto& t : out) t.c *= factor;
  return closed_form(std::move(out));
}

std::span<const ExpTerm> RadialProfile::terms() const { return terms_; }

const numerics::RadialGrid& RadialProfile::grid() const {
  if (!sampled_) throw InputError("profile is not sampled");
  return sampled_->grid;
}

std::span<const Complex> RadialProfile::samples() const {
  if (!sampled_) throw InputError("profile is not sampled");
  return sampled_->value;
}

std::string RadialProfile::to_string() const {
  if (sampled_) {
    std::ostringstream os;
    os << "sampled[" << sampled_->grid.size() << " nodes, " << sampled_->grid.r_min() << ".."
       << sampled_->grid.r_max() << "]";
    return os.str();
  }
  if (callable_) return "callable";
  if (terms_.empty()) return "zero";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    if (t.c != 1.0) {
      if (t.c.imag() == 0.0) {
        os << t.c.real() << "*";
      } else {
        os << "(" << t.c.real() << "," << t.c.imag() << ")*";
      }
    }
    os << (t.q == 1 ? "exp:" : "gauss:") << t.p << "," << t.a;
  }
  return os.str();
}

RadialProfile tabulate(const RadialProfile& profile, const numerics::RadialGrid& grid) {
  std::vector<Complex> values;
  values.reserve(grid.size());
  for (double r : grid.nodes()) values.push_back(profile(r));
  return RadialProfile::sampled(grid, std::move(values));
}

SpinorField::SpinorField(int k, RadialProfile profile) { add(k, std::move(profile)); }

void SpinorField::add(int k, RadialProfile profile) {
  Channel check(k);
  if (!terms_.emplace(k, std::move(profile)).second)
    throw InputError("spinor field: channel k = " + std::to_string(k) + " given twice");
}

std::vector<double> SpinorField::breakpoints() const {
  std::vector<double> out;
  for (const auto& [k, f] : terms_) {
    const auto b = f.breakpoints();
    out.insert(out.end(), b.begin(), b.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SpinorField SpinorField::scaled(double alpha) const {
  SpinorField out;
  for (const auto& [k, f] : terms_) out.add(k, f.scaled(alpha));
  return out;
}

RadialProfile radial_sigma_grad(const RadialProfile& f, const Channel& channel) {
  const int k = channel.k();
  switch (f.kind()) {
    case RadialProfile::Kind::closed_form: {
      std::vector<ExpTerm> out;
      for (const auto& t : f.terms()) {
        // d/dr (c r^p e^{-a r^q}) - k c r^{p-1} e^{-a r^q}
        const Complex lead = t.c * (t.p - k);
        if (lead != 0.0) out.push_back({lead, t.p - 1.0, t.a, t.q});
        if (t.a != 0.0) out.push_back({-t.c * t.a * static_cast<double>(t.q), t.p + t.q - 1.0, t.a, t.q});
      }
      return RadialProfile::closed_form(std::move(out));
    }
    case RadialProfile::Kind::sampled: {
      const auto& grid = f.grid();
      std::vector<Complex> values;
      values.reserve(grid.size());
      for (double r : grid.nodes()) values.push_back(f.derivative(r) - static_cast<double>(k) * f(r) / r);
      return RadialProfile::sampled(grid, std::move(values));
    }
    case RadialProfile::Kind::callable:
      break;
  }
  if (!f.differentiable()) throw InputError("radial_sigma_grad: profile is not differentiable");
  return RadialProfile::callable(
      [f, k](double r) { return f.derivative(r) - static_cast<double>(k) * f(r) / r; }, {},
      f.breakpoints(), f.support_lo(), f.support_hi());
}

}  // namespace hardy::waves
