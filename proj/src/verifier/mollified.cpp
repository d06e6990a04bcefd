#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/errors.hpp"
#include "hardy/verifier.hpp"

namespace hardy::verifier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_a^b w(r) |f' - k f / r|^2 r^2 dr over the channels of the field.
double grad_piece(const SpinorField& field, double a, double b,
                  const std::function<double(double)>& weight) {
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  for (const auto& [k, f] : field.terms()) {
    const auto d = waves::radial_sigma_grad(f, waves::Channel(k));
    auto bps = d.breakpoints();
    bps.push_back(1.0);
    numerics::QuadratureOptions options;
    options.max_pieces = 4000 + 4 * bps.size();
    sum += numerics::integrate_radial(
               [&](double r) {
                 const double v = std::norm(d(r));
                 return v == 0.0 ? 0.0 : weight(r) * v * r * r;
               },
               a, b, numerics::SingularityHint::none, bps, options)
               .value;
  }
  return sum;
}

}  // namespace

MollifiedReport mollified_delta_experiment(double c1, double c2, double radius,
                                           std::span<const double> eps_list,
                                           const SpinorField& field, double m,
                                           std::optional<double> lambda) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw InputError("mollified experiment: c1, c2 must be > 0");
  if (!(radius > 0.0)) throw InputError("mollified experiment: shell radius must be > 0");
  if (eps_list.empty()) throw InputError("mollified experiment: empty eps list");
  for (double eps : eps_list) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("mollified experiment: eps must be > 0");
  }
  MollifiedReport report;
  report.c1 = c1;
  report.c2 = c2;
  report.radius = radius;
  report.m = m;
  report.lambda = lambda ? *lambda : select_lambda(c1, c2, m);
  GapParameters{m, report.lambda, 0.0}.validate();
  const double lam = report.lambda;

  double shell = 0.0;
  for (const auto& [k, f] : field.terms()) shell += std::norm(f(radius));
  shell *= c1 * radius * radius;
  const double mass = (m + lam) * waves::field_norm(field);

  for (double eps : eps_list) {
    MollifiedRow row;
    row.eps = eps;
    row.lhs = shell;
    const double lo = std::max(0.0, 1.0 - eps);
    const double hi = 1.0 + eps;
    const auto flat = [&](double) { return 1.0 / (m - lam); };
    row.bulk = grad_piece(field, 0.0, lo, flat) + grad_piece(field, hi, kInf, flat);
    row.annulus = grad_piece(field, lo, hi, [&](double r) {
      return 1.0 / (m + c2 / eps * potentials::bump((r - 1.0) / eps) - lam);
    });
    row.annulus_bound =
        grad_piece(field, lo, hi, [&](double) { return 1.0 / (m + c2 / eps - lam); });
    row.mass = mass;
    row.rhs = row.bulk + row.annulus + row.mass;
    row.vacuous = row.lhs == 0.0;
    row.ratio = row.vacuous || row.rhs == 0.0 ? 0.0 : row.lhs / row.rhs;
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double prev = report.rows[i - 1].annulus;
    report.annulus_ratios.push_back(prev > 0.0 ? report.rows[i].annulus / prev : 0.0);
  }
  return report;
}

}  // namespace hardy::verifier
