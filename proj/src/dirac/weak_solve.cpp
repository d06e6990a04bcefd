#include <cmath>
#include <sstream>

#include "hardy/dirac.hpp"
#include "hardy/errors.hpp"

namespace hardy::dirac {

namespace {

// w2'(r) by central differences; w2 comes from generic components.
double w2_derivative(const DiracChannelProblem& problem, double r) {
  const double h = 1e-5 * r;
  return (problem.w2(r + h) - problem.w2(r - h)) / (2.0 * h);
}

struct LowerParts {
  Complex g;
  Complex dg;
};

// g = -(p + D phi) / G and its derivative, G = m + w2 - lambda.
LowerParts lower_component(const DiracChannelProblem& problem, const RadialProfile& f2, double r,
                           const std::array<Complex, 3>& phi) {
  const double k = problem.channel.k();
  const double G = problem.m + problem.w2(r) - problem.lambda;
  const Complex d_phi = phi[1] - k * phi[0] / r;
  const Complex d_phi_prime = phi[2] - k * phi[1] / r + k * phi[0] / (r * r);
  const Complex p = f2(r);
  const Complex dp = f2.derivative(r);
  const Complex numer = p + d_phi;
  return {-numer / G, -((dp + d_phi_prime) * G - numer * w2_derivative(problem, r)) / (G * G)};
}

double l2_norm(const RadialProfile& f) {
  if (f.kind() == RadialProfile::Kind::closed_form && f.terms().empty()) return 0.0;
  return std::sqrt(f.norm_squared());
}

}  // namespace

WeakSolveResult weak_solve_fixed(const DiracChannelProblem& problem, const RadialProfile& f1,
                                 const RadialProfile& f2) {
  problem.validate();
  if (!f2.differentiable()) throw InputError("weak_solve: F2 profile must be differentiable");
  const auto breaks = problem.weight_breakpoints();
  const auto space = std::make_shared<const FeSpace>(problem.grid, problem.degree, breaks);
  const int p = space->degree();
  const std::size_t n = space->dofs() - 1;  // last dof pinned at r_max
  const double k = problem.channel.k();
  const double m = problem.m;
  const double lam = problem.lambda;

  numerics::BandedSymmetric a(n, static_cast<std::size_t>(p));
  std::vector<Complex> b(n, 0.0);
  for (std::size_t e = 0; e < space->elements(); ++e) {
    for (int q = 0; q < FeSpace::kQuadPoints; ++q) {
      const auto B = space->at_quad_point(e, q);
      const double r = B.r;
      const double mass = (m - problem.w1(r) + lam) * r * r * B.weight_dr;
      const double G = m + problem.w2(r) - lam;
      const double grad = B.weight_dr / G;  // (D u)(D v) r^2 with D u = (u_t - k u) / r
      const Complex F1 = f1(r);
      const Complex P = f2(r);
      for (int i = 0; i <= p; ++i) {
        const std::size_t gi = e * p + i;
        if (gi >= n) continue;
        const double di = B.dt[i] - k * B.value[i];
        for (int j = 0; j <= i; ++j) {
          const std::size_t gj = e * p + j;
          if (gj >= n) continue;
          const double dj = B.dt[j] - k * B.value[j];
          a.add(gi, gj, mass * B.value[i] * B.value[j] + grad * di * dj);
        }
        b[gi] += F1 * B.value[i] * r * r * B.weight_dr - P * di * r / G * B.weight_dr;
      }
    }
  }
  for (const auto& [radius, weight] : problem.shell_terms()) {
    const std::size_t dof = space->vertex_dof(radius);
    if (dof < n) a.add(dof, dof, -weight);
  }

  std::vector<Complex> x;
  try {
    numerics::BandedCholesky chol(a);
    x = chol.solve(b);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite(
        "weak_solve: discrete H-form is not positive definite (regime hypotheses fail on this "
        "channel or grid)");
  }

  WeakSolveResult out;
  const auto ax = a.multiply(std::span<const Complex>(x));
  Complex energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) energy += std::conj(x[i]) * ax[i];
  out.h_norm_phi = std::sqrt(std::max(0.0, energy.real()));

  x.push_back(0.0);
  FeFunction fe(space, std::move(x));
  out.phi = fe.profile();
  out.grid_nodes = problem.grid.size();
  out.dofs = space->dofs();
  out.f1 = f1;
  out.f2 = f2;
  out.problem = std::make_shared<const DiracChannelProblem>(problem);
  {
    const auto fe_ptr = std::make_shared<const FeFunction>(fe);
    const auto pr = out.problem;
    const auto f2_copy = f2;
    out.chi = RadialProfile::callable(
        [fe_ptr, pr, f2_copy](double r) {
          return lower_component(*pr, f2_copy, r, fe_ptr->evaluate(r)).g;
        },
        [fe_ptr, pr, f2_copy](double r) {
          return lower_component(*pr, f2_copy, r, fe_ptr->evaluate(r)).dg;
        },
        space->vertex_radii(), space->r_min(), space->r_max());
  }

  double ru = 0.0;
  double rl = 0.0;
  for (std::size_t e = 0; e < space->elements(); ++e) {
    for (int q = 0; q < FeSpace::kQuadPoints; ++q) {
      const auto B = space->at_quad_point(e, q);
      const double r = B.r;
      const auto phi = fe.at_quad_point(e, q, B);
      const auto low = lower_component(problem, f2, r, phi);
      const Complex upper =
          (m - problem.w1(r) + lam) * phi[0] + low.dg + (k + 2.0) * low.g / r - f1(r);
      const Complex lower =
          -(phi[1] - k * phi[0] / r) + (-m - problem.w2(r) + lam) * low.g - f2(r);
      ru += std::norm(upper) * r * r * B.weight_dr;
      rl += std::norm(lower) * r * r * B.weight_dr;
    }
  }
  out.residual_upper = std::sqrt(ru);
  out.residual_lower = std::sqrt(rl);
  out.rhs_norm = l2_norm(f1) + l2_norm(f2);
  out.fe_phi = std::move(fe);
  return out;
}

WeakSolveResult weak_solve(const DiracChannelProblem& problem, const RadialProfile& f1,
                           const RadialProfile& f2, const WeakSolveOptions& options) {
  DiracChannelProblem current = problem;
  std::ostringstream history;
  for (int level = 0;; ++level) {
    auto result = weak_solve_fixed(current, f1, f2);
    result.refinements = level;
    const double residual = result.residual_upper + result.residual_lower;
    if (residual <= options.tolerance * result.rhs_norm || result.rhs_norm == 0.0) return result;
    history << (level ? ", " : "") << current.grid.size() << " nodes: " << residual / result.rhs_norm;
    if (level >= options.max_refinements) {
      throw ConvergenceError("weak_solve: relative residual above " +
                             std::to_string(options.tolerance) + " after " +
                             std::to_string(level) + " refinements (" + history.str() + ")");
    }
    current.grid = current.grid.refined();
  }
}

Complex discrete_pairing(const WeakSolveResult& u, const WeakSolveResult& v) {
  if (!u.fe_phi || !v.fe_phi || !u.problem || !v.problem)
    throw InputError("discrete_pairing: results carry no discrete data");
  const auto& space = u.fe_phi->space();
  if (u.fe_phi->space_ptr() != v.fe_phi->space_ptr()) {
    const auto tu = space.vertex_t();
    const auto tv = v.fe_phi->space().vertex_t();
    if (!std::equal(tu.begin(), tu.end(), tv.begin(), tv.end()) ||
        space.degree() != v.fe_phi->space().degree())
      throw InputError("discrete_pairing: solutions live on different meshes");
  }
  const auto& problem = *v.problem;
  Complex sum = 0.0;
  for (std::size_t e = 0; e < space.elements(); ++e) {
    for (int q = 0; q < FeSpace::kQuadPoints; ++q) {
      const auto B = space.at_quad_point(e, q);
      const double r = B.r;
      const auto phi_v = v.fe_phi->at_quad_point(e, q, B);
      const Complex g_v = lower_component(problem, v.f2, r, phi_v).g;
      sum += (u.f1(r) * std::conj(phi_v[0]) + u.f2(r) * std::conj(g_v)) * r * r * B.weight_dr;
    }
  }
  return sum;
}

double discrete_norm(const WeakSolveResult& u) {
  if (!u.fe_phi || !u.problem) throw InputError("discrete_norm: result carries no discrete data");
  const auto& space = u.fe_phi->space();
  double sum = 0.0;
  for (std::size_t e = 0; e < space.elements(); ++e) {
    for (int q = 0; q < FeSpace::kQuadPoints; ++q) {
      const auto B = space.at_quad_point(e, q);
      const auto phi = u.fe_phi->at_quad_point(e, q, B);
      const Complex g = lower_component(*u.problem, u.f2, B.r, phi).g;
      sum += (std::norm(phi[0]) + std::norm(g)) * B.r * B.r * B.weight_dr;
    }
  }
  return std::sqrt(sum);
}

}  // namespace hardy::dirac
