#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardy/dirac.hpp"
#include "hardy/errors.hpp"

namespace hardy::dirac {

namespace {

// Quadrature data of the mesh, tabulated once per problem so that Q(E) can
// be reassembled cheaply for every trial energy.
struct Tabulated {
  std::shared_ptr<const FeSpace> space;
  std::vector<FeSpace::PointBasis> points;  // element-major
  std::vector<double> w1, w2;
  std::vector<std::pair<std::size_t, double>> shells;  // (dof, c1 a R^2)
};

Tabulated tabulate(const DiracChannelProblem& problem) {
  Tabulated tab;
  tab.space = std::make_shared<const FeSpace>(problem.grid, problem.degree,
                                              problem.weight_breakpoints());
  for (std::size_t e = 0; e < tab.space->elements(); ++e) {
    for (int q = 0; q < FeSpace::kQuadPoints; ++q) {
      auto b = tab.space->at_quad_point(e, q);
      tab.w1.push_back(problem.w1(b.r));
      tab.w2.push_back(problem.w2(b.r));
      tab.points.push_back(std::move(b));
    }
  }
  for (const auto& [radius, weight] : problem.shell_terms())
    tab.shells.emplace_back(tab.space->vertex_dof(radius), weight);
  return tab;
}

// Q(E)[u, v] = int (m - w1 - E) u v r^2 + int D u D v / (m + w2 + E) r^2 - shells
// with u = 0 at both mesh ends (dofs 1 .. N - 2).
numerics::BandedSymmetric assemble_q(const Tabulated& tab, int k, double m, double energy) {
  const auto& space = *tab.space;
  const int p = space.degree();
  const std::size_t n = space.dofs() - 2;
  numerics::BandedSymmetric q_matrix(n, static_cast<std::size_t>(p));
  std::size_t idx = 0;
  for (std::size_t e = 0; e < space.elements(); ++e) {
    for (int q = 0; q < FeSpace::kQuadPoints; ++q, ++idx) {
      const auto& b = tab.points[idx];
      const double mass = (m - tab.w1[idx] - energy) * b.r * b.r * b.weight_dr;
      const double grad = b.weight_dr / (m + tab.w2[idx] + energy);
      for (int i = 0; i <= p; ++i) {
        const std::size_t gi = e * p + i;
        if (gi == 0 || gi > n) continue;
        const double di = b.dt[i] - k * b.value[i];
        for (int j = 0; j <= i; ++j) {
          const std::size_t gj = e * p + j;
          if (gj == 0 || gj > n) continue;
          const double dj = b.dt[j] - k * b.value[j];
          q_matrix.add(gi - 1, gj - 1, mass * b.value[i] * b.value[j] + grad * di * dj);
        }
      }
    }
  }
  for (const auto& [dof, weight] : tab.shells) {
    if (dof >= 1 && dof <= n) q_matrix.add(dof - 1, dof - 1, -weight);
  }
  return q_matrix;
}

std::vector<double> eigenvalues_on(const Tabulated& tab, int k, double m, std::size_t count,
                                   double tolerance) {
  // Q(E) decreases in E, so its negative inertia counts eigenvalues below E.
  const auto below = [&](double energy) {
    return numerics::negative_inertia(assemble_q(tab, k, m, energy));
  };
  const double lo0 = -m * (1.0 - 1e-12);
  const double hi0 = m * (1.0 - 1e-12);
  const std::size_t at_lo = below(lo0);
  const std::size_t total = below(hi0);
  std::vector<double> out;
  for (std::size_t index = at_lo; index < total && out.size() < count; ++index) {
    double lo = out.empty() ? lo0 : out.back();
    double hi = hi0;
    while (hi - lo > tolerance * m) {
      const double mid = 0.5 * (lo + hi);
      if (below(mid) > index) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

// Largest element width in t = ln r; refinement also widens the domain, so
// the width ratio between grids is a little above 1/2.
double log_spacing(const numerics::RadialGrid& grid) {
  const auto nodes = grid.nodes();
  double h = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) h = std::max(h, std::log(nodes[i] / nodes[i - 1]));
  return h;
}

void check(const DiracChannelProblem& problem, bool allow_outside_regime) {
  if (!(problem.m > 0.0)) throw InputError("mass m must be positive");
  if (allow_outside_regime) {
    problem.pair.validate();
  } else {
    problem.validate();
  }
}

}  // namespace

std::size_t count_below(const DiracChannelProblem& problem, double energy) {
  check(problem, false);
  if (!(std::abs(energy) < problem.m)) throw InputError("count_below: energy must be in (-m, m)");
  return numerics::negative_inertia(
      assemble_q(tabulate(problem), problem.channel.k(), problem.m, energy));
}

std::vector<double> gap_eigenvalues_fixed(const DiracChannelProblem& problem, std::size_t count,
                                          double bisection_tolerance, bool allow_outside_regime) {
  check(problem, allow_outside_regime);
  return eigenvalues_on(tabulate(problem), problem.channel.k(), problem.m, count,
                        bisection_tolerance);
}

SpectrumResult spectrum_in_gap(const DiracChannelProblem& problem, std::size_t count,
                               const SpectrumOptions& options) {
  check(problem, options.allow_outside_regime);
  const int k = problem.channel.k();
  const auto solve = [&](const numerics::RadialGrid& grid) {
    DiracChannelProblem p = problem;
    p.grid = grid;
    return eigenvalues_on(tabulate(p), k, problem.m, count, options.bisection_tolerance);
  };
  const auto fine_grid = problem.grid.refined();
  const auto finest_grid = fine_grid.refined();
  const auto coarse = solve(problem.grid);
  const auto fine = solve(fine_grid);
  std::vector<double> finest;
  if (options.estimate_order) finest = solve(finest_grid);
  const double ratio_1 = log_spacing(problem.grid) / log_spacing(fine_grid);
  const double ratio_2 = log_spacing(fine_grid) / log_spacing(finest_grid);

  SpectrumResult result;
  const std::size_t n = std::min(coarse.size(), fine.size());
  if (coarse.size() != fine.size()) {
    std::ostringstream w;
    w << "channel " << k << ": eigenvalue count changed under refinement (" << coarse.size()
      << " -> " << fine.size() << ")";
    result.warnings.push_back(w.str());
  }
  // Galerkin eigenvalue errors of degree-p elements scale like h^(2p).
  const double assumed_order = 2.0 * problem.degree;
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = std::abs(fine[i] - coarse[i]);
    if (delta > options.stability_tolerance * problem.m) {
      std::ostringstream w;
      w.precision(12);
      w << "channel " << k << ": dropped unstable eigenvalue #" << i << " (" << coarse[i] << " -> "
        << fine[i] << ")";
      result.warnings.push_back(w.str());
      continue;
    }
    GapEigenvalue ev;
    ev.k = k;
    ev.index = static_cast<int>(i);
    ev.value = fine[i];
    double order = assumed_order;
    if (i < finest.size()) {
      const double next = std::abs(finest[i] - fine[i]);
      if (next > 0.0 && delta > 0.0) {
        ev.observed_order = std::log(delta / next) / std::log(ratio_2);
        order = std::max(1.0, ev.observed_order);
      }
      ev.value = finest[i];
      ev.error_estimate = next / (std::pow(ratio_2, order) - 1.0);
    } else {
      ev.error_estimate = delta / (std::pow(ratio_1, order) - 1.0);
    }
    result.eigenvalues.push_back(ev);
  }
  return result;
}

ShellSpectrumTable shell_spectrum_demo(std::span<const double> a_values, double radius, double nu,
                                       double m, std::span<const int> k_set,
                                       const numerics::RadialGrid& grid, std::size_t count,
                                       int degree) {
  if (!(radius > 0.0)) throw InputError("shell_spectrum_demo: radius must be positive");
  if (!(nu >= 0.0)) throw InputError("shell_spectrum_demo: nu must be >= 0");
  ShellSpectrumTable table;
  for (double a : a_values) {
    if (!(a >= 0.0)) throw InputError("shell_spectrum_demo: a must be >= 0");
    const bool outside = a * nu >= 4.0 / 9.0;
    if (outside) {
      std::ostringstream w;
      w << "a*nu = " << a * nu << " >= 4/9: outside guaranteed regime";
      table.warnings.push_back(w.str());
    }
    potentials::PotentialPair pair;
    pair.v1_shells = {{radius, 1.0}};
    pair.v2 = potentials::RadialWeight::coulomb(1.0);
    pair.c1 = a;
    pair.c2 = nu;
    for (int k : k_set) {
      DiracChannelProblem problem(pair, k, m, default_lambda(pair, m), grid, degree);
      SpectrumOptions options;
      options.allow_outside_regime = outside;
      const auto spectrum = spectrum_in_gap(problem, count, options);
      for (const auto& w : spectrum.warnings) table.warnings.push_back(w);
      for (const auto& ev : spectrum.eigenvalues)
        table.rows.push_back({a, k, ev.index, ev.value, ev.error_estimate, outside});
    }
  }
  return table;
}

}  // namespace hardy::dirac
