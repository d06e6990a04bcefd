#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardy/numerics.hpp"
#include "hardy/partial_waves.hpp"
#include "hardy/potentials.hpp"

namespace hardy::dirac {

using waves::Complex;
using waves::RadialProfile;

// ---------------------------------------------------------------------------
// Finite elements in t = ln r
// ---------------------------------------------------------------------------

/// Continuous piecewise polynomials of fixed degree in t = ln r on the
/// vertices of a radial grid. Global dof e * degree + j is local node j of
/// element e (equispaced reference nodes), so vertex i is dof i * degree.
class FeSpace {
 public:
  /// Vertices are the grid nodes plus `extra_vertices` inside the grid range
  /// (shell radii, weight breakpoints); nodes closer than a tenth of the
  /// local spacing are moved onto the extra vertex instead.
  FeSpace(const numerics::RadialGrid& grid, int degree, std::span<const double> extra_vertices = {});

  int degree() const noexcept { return degree_; }
  std::size_t elements() const noexcept { return t_.size() - 1; }
  std::size_t dofs() const noexcept { return elements() * degree_ + 1; }
  std::span<const double> vertex_t() const noexcept { return t_; }
  std::vector<double> vertex_radii() const;
  double r_min() const;
  double r_max() const;
  /// Dof sitting on the vertex at radius r (throws if r is not a vertex).
  std::size_t vertex_dof(double r) const;

  /// Reference basis on [-1, 1]: values, first and second derivatives.
  void basis(double xi, std::span<double> value, std::span<double> d1, std::span<double> d2) const;

  /// Gauss points used for assembly and element-wise norms.
  static constexpr int kQuadPoints = 10;
  std::span<const double> quad_xi() const noexcept { return qxi_; }
  std::span<const double> quad_w() const noexcept { return qw_; }
  /// Basis values and t-derivatives at quadrature point q of element e
  /// (value[j], dt[j], dtt[j] for j = 0..degree).
  struct PointBasis {
    double r;
    double weight_dr;  // Gauss weight times dr
    std::vector<double> value;
    std::vector<double> dt;
    std::vector<double> dtt;
  };
  PointBasis at_quad_point(std::size_t element, int q) const;

  /// Element containing t (clamped to the mesh).
  std::size_t locate(double t) const;

 private:
  int degree_;
  std::vector<double> t_;
  std::vector<double> qxi_;
  std::vector<double> qw_;
  // Reference basis tabulated at the Gauss points.
  std::vector<double> ref_value_, ref_d1_, ref_d2_;
};

/// f(r) = sum_i c_i N_i(ln r); zero outside [r_min, r_max].
class FeFunction {
 public:
  FeFunction(std::shared_ptr<const FeSpace> space, std::vector<Complex> coefficients);

  const FeSpace& space() const noexcept { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const noexcept { return space_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  /// {f, f', f''} with respect to r.
  std::array<Complex, 3> evaluate(double r) const;
  /// Same at quadrature point q of element e.
  std::array<Complex, 3> at_quad_point(std::size_t element, int q,
                                       const FeSpace::PointBasis& basis) const;

  /// Callable profile with the mesh vertices as breakpoints.
  RadialProfile profile() const;

 private:
  std::shared_ptr<const FeSpace> space_;
  std::vector<Complex> coeffs_;
};

// ---------------------------------------------------------------------------
// Channel problems
// ---------------------------------------------------------------------------

/// Which self-adjointness criterion the problem falls under.
enum class Regime {
  w1_nonpositive,  // w1 <= 0 <= w2
  w1_nonnegative,  // 0 <= w1, c1 c2 < 1 / max{A+^2, A-^2}
  measure,         // shells in w1, same constant condition
};
std::string_view to_string(Regime regime);

/// w1 = c1 V1 (regular part and shells), w2 = c2 V2 on one channel. The lower
/// component is chi = i g(r) (sigma.x/|x|) Omega_k and a lower right-hand side
/// F2 = i p(r) (sigma.x/|x|) Omega_k is described by its profile p.
struct DiracChannelProblem {
  DiracChannelProblem(potentials::PotentialPair pair, int k, double m, double lambda,
                      numerics::RadialGrid grid, int degree = 4);

  potentials::PotentialPair pair;
  waves::Channel channel;
  double m;
  double lambda;
  numerics::RadialGrid grid;
  int degree;

  double w1(double r) const { return pair.c1 * pair.v1(r); }
  double w2(double r) const { return pair.c2 * pair.v2(r); }
  /// c1 a R^2 per shell.
  std::vector<std::pair<double, double>> shell_terms() const;
  /// Radii where w1, w2 have kinks, jumps or shells.
  std::vector<double> weight_breakpoints() const;

  /// max{A+^2, A-^2} of (V1, V2), computed once.
  double theorem_constant() const;
  /// Classifies the problem; throws HypothesisError when no regime applies.
  Regime regime() const;
  /// Regime plus parameter checks (m > 0, lambda in (-m, m), w2 >= 0).
  Regime validate() const;

 private:
  mutable std::optional<double> theorem_constant_;
};

/// Default lambda: select_lambda(c1, c2, m) when c1 > 0, m / 2 otherwise.
double default_lambda(const potentials::PotentialPair& pair, double m);

/// (phi, psi)_H = int (m - w1 + lambda) phi conj(psi) r^2
///              + int D phi conj(D psi) / (m + w2 - lambda) r^2
///              - sum c1 a R^2 phi(R) conj(psi(R)),   D = d/dr - k / r.
/// Throws HypothesisError("not in H") when an integral diverges.
Complex h_inner_product(const RadialProfile& phi1, const RadialProfile& phi2,
                        const DiracChannelProblem& problem);

/// ||phi||^2 of the comparison norm int |D phi|^2 / (m + w2 - lambda) r^2
/// + (m + lambda) int |phi|^2 r^2.
double comparison_norm_squared(const RadialProfile& phi, const DiracChannelProblem& problem);

struct NormEquivalence {
  double c_low = 0.0;
  double c_high = 0.0;
  /// Both bounds finite and positive.
  bool regime_ok = false;
};

/// Min and max of ||phi||_H^2 / comparison norm^2 over the gallery.
NormEquivalence norm_equivalence_probe(const DiracChannelProblem& problem,
                                       std::span<const RadialProfile> gallery);

struct ShellCharge {
  double radius = 0.0;
  Complex charge = 0.0;  // c1 a R^2 phi(R)
};

struct AppliedH {
  /// (m - w1 + lambda) f + g' + (k + 2) g / r (regular part)
  RadialProfile upper;
  /// -(f' - k f / r) + (-m - w2 + lambda) g
  RadialProfile lower;
  std::vector<ShellCharge> shell_charges;
};

/// Radial form of (H_V + lambda)(phi, chi); phi and chi need derivatives.
AppliedH apply_H(const DiracChannelProblem& problem, const RadialProfile& phi,
                 const RadialProfile& chi);

// ---------------------------------------------------------------------------
// Weak solve of (H_V + lambda)(phi, chi) = (F1, F2)
// ---------------------------------------------------------------------------

struct WeakSolveOptions {
  /// Residual target relative to ||F1|| + ||F2||.
  double tolerance = 1e-6;
  /// Grid refinements attempted when the target is missed.
  int max_refinements = 2;
};

struct WeakSolveResult {
  RadialProfile phi;
  RadialProfile chi;
  double residual_upper = 0.0;
  double residual_lower = 0.0;
  double h_norm_phi = 0.0;
  double rhs_norm = 0.0;  // ||F1|| + ||F2||
  int refinements = 0;
  std::size_t grid_nodes = 0;
  std::size_t dofs = 0;

  /// Discrete data for pairings; all solves of one problem share the mesh
  /// when no refinement happened.
  std::optional<FeFunction> fe_phi;
  std::shared_ptr<const DiracChannelProblem> problem;
  RadialProfile f1;
  RadialProfile f2;
};

/// Galerkin solution of the H-form equation (phi, eta)_H = T(eta) on the
/// mesh of problem.grid (natural condition at r_min, phi(r_max) = 0), then
/// chi = -(p + D phi) / (m + w2 - lambda). Refines the grid up to
/// options.max_refinements times; throws ConvergenceError if the residual
/// target is still missed and NotPositiveDefinite if the form is indefinite.
WeakSolveResult weak_solve(const DiracChannelProblem& problem, const RadialProfile& f1,
                           const RadialProfile& f2, const WeakSolveOptions& options = {});

/// Single solve on a fixed grid, no refinement, no tolerance check.
WeakSolveResult weak_solve_fixed(const DiracChannelProblem& problem, const RadialProfile& f1,
                                 const RadialProfile& f2);

/// <(H_V + lambda) u, v> with (H_V + lambda) u = (F1_u, F2_u) the solve
/// data: int F1_u conj(phi_v) r^2 + int p_u conj(g_v) r^2, by Gauss
/// quadrature on the shared mesh.
Complex discrete_pairing(const WeakSolveResult& u, const WeakSolveResult& v);
/// sqrt(int |phi|^2 + |g|^2 r^2) by the same quadrature.
double discrete_norm(const WeakSolveResult& u);

// ---------------------------------------------------------------------------
// Gap spectrum
// ---------------------------------------------------------------------------

struct GapEigenvalue {
  int k = 0;
  int index = 0;
  double value = 0.0;
  /// Richardson estimate |E_h - E_{h/2}| / (rho^order - 1), rho the ratio of
  /// the largest log-mesh widths (slightly below 2, refinement widens the box).
  double error_estimate = 0.0;
  /// Observed order from three grids (0 when not determined).
  double observed_order = 0.0;
};

struct SpectrumOptions {
  /// Eigenvalues whose grid change exceeds this are dropped as unstable.
  double stability_tolerance = 1e-5;
  /// Absolute bisection tolerance relative to m.
  double bisection_tolerance = 1e-13;
  /// Also solve on a third, twice-refined grid for the observed order.
  bool estimate_order = false;
  /// Proceed outside the regime hypotheses (flagged by the caller).
  bool allow_outside_regime = false;
};

struct SpectrumResult {
  std::vector<GapEigenvalue> eigenvalues;
  std::vector<std::string> warnings;
};

/// Number of discrete eigenvalues below E (negative inertia of Q(E)).
std::size_t count_below(const DiracChannelProblem& problem, double energy);

/// Eigenvalues in (-m, m) on a single grid, ascending, at most `count`.
std::vector<double> gap_eigenvalues_fixed(const DiracChannelProblem& problem, std::size_t count,
                                          double bisection_tolerance = 1e-13,
                                          bool allow_outside_regime = false);

/// Lowest `count` eigenvalues of the channel in the gap, with Richardson
/// control between problem.grid and its refinement.
SpectrumResult spectrum_in_gap(const DiracChannelProblem& problem, std::size_t count,
                               const SpectrumOptions& options = {});

struct ShellSpectrumRow {
  double a = 0.0;
  int k = 0;
  int index = 0;
  double value = 0.0;
  double error_estimate = 0.0;
  bool outside_regime = false;
};

struct ShellSpectrumTable {
  std::vector<ShellSpectrumRow> rows;
  std::vector<std::string> warnings;
};

/// w1 = a delta_{|x| = R}, w2 = nu / r: gap eigenvalues versus a. Runs with
/// a * nu >= 4/9 are flagged rather than refused.
ShellSpectrumTable shell_spectrum_demo(std::span<const double> a_values, double radius, double nu,
                                       double m, std::span<const int> k_set,
                                       const numerics::RadialGrid& grid, std::size_t count = 2,
                                       int degree = 4);

}  // namespace hardy::dirac
