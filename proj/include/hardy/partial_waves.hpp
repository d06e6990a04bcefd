#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardy/numerics.hpp"
#include "hardy/potentials.hpp"

namespace hardy::waves {

using Complex = std::complex<double>;

/// Eigenvalue k of sigma.L. kappa = k + 1, orbital index l = k (k >= 0) or
/// -k - 1 (k <= -2).
class Channel {
 public:
  explicit Channel(int k);

  int k() const noexcept { return k_; }
  int kappa() const noexcept { return k_ + 1; }
  int l() const noexcept { return k_ >= 0 ? k_ : -k_ - 1; }

 private:
  int k_;
};

/// c * r^p * exp(-a r^q), q in {1, 2}.
struct ExpTerm {
  Complex c = 1.0;
  double p = 0.0;
  double a = 0.0;
  int q = 1;
};

/// Radial factor f(r) of a channel term f(r) Omega_k.
///
/// Three representations: closed-form sums of ExpTerm (exact derivatives),
/// samples on a RadialGrid (cubic interpolation and 4th-order derivatives in
/// t = ln r, zero outside the grid), and callables with an optional
/// derivative.
class RadialProfile {
 public:
  enum class Kind { closed_form, sampled, callable };

  RadialProfile();  // identically zero

  static RadialProfile closed_form(std::vector<ExpTerm> terms);
  static RadialProfile exp(double p, double a, Complex c = 1.0);
  static RadialProfile gauss(double p, double a, Complex c = 1.0);
  static RadialProfile power(double p, Complex c = 1.0);

  /// Smooth samples; at least 5 nodes.
  static RadialProfile sampled(numerics::RadialGrid grid, std::vector<Complex> values);

  using ComplexFunction = std::function<Complex(double)>;
  static RadialProfile callable(ComplexFunction value, ComplexFunction derivative = {},
                                std::vector<double> breakpoints = {}, double support_lo = 0.0,
                                double support_hi = std::numeric_limits<double>::infinity());

  Kind kind() const noexcept;
  Complex operator()(double r) const;
  /// f'(r). Throws InputError when the profile is not differentiable.
  Complex derivative(double r) const;
  bool differentiable() const;

  /// Radii where the profile has kinks or support edges.
  std::vector<double> breakpoints() const;
  double support_lo() const;
  double support_hi() const;

  /// Closed forms: every term square integrable against r^2 dr. Samples and
  /// callables are assumed finite.
  bool has_finite_norm() const;
  /// Integral of |f|^2 r^2 dr.
  double norm_squared() const;

  /// alpha^{3/2} f(alpha r), the L^2-preserving dilation.
  RadialProfile scaled(double alpha) const;
  RadialProfile scaled_by(Complex factor) const;

  /// Closed-form terms; empty for other kinds.
  std::span<const ExpTerm> terms() const;
  /// Grid of a sampled profile (throws for other kinds).
  const numerics::RadialGrid& grid() const;
  std::span<const Complex> samples() const;

  std::string to_string() const;

 private:
  struct Sampled;
  struct Callable;
  std::vector<ExpTerm> terms_;
  std::shared_ptr<const Sampled> sampled_;
  std::shared_ptr<const Callable> callable_;
};

/// Samples `profile` on the grid.
RadialProfile tabulate(const RadialProfile& profile, const numerics::RadialGrid& grid);

/// Finite partial-wave expansion, at most one profile per channel.
class SpinorField {
 public:
  SpinorField() = default;
  SpinorField(int k, RadialProfile profile);

  void add(int k, RadialProfile profile);
  const std::map<int, RadialProfile>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::vector<double> breakpoints() const;
  /// Every profile dilated by alpha (see RadialProfile::scaled).
  SpinorField scaled(double alpha) const;

 private:
  std::map<int, RadialProfile> terms_;
};

/// r -> f'(r) - k f(r) / r, the radial factor of sigma.grad(f Omega_k) on the
/// partner spinor (sigma.x/|x|) Omega_k.
RadialProfile radial_sigma_grad(const RadialProfile& f, const Channel& channel);

/// g_k (k >= 0) or h_k (k <= -2) and the regular part of W_k. Shell masses
/// in V1 enter g/h; the singular part of W_k is not represented.
struct ChannelWeights {
  RadialProfile g_or_h;
  RadialProfile w;
  bool is_g = true;
};
ChannelWeights channel_weights(const potentials::PotentialPair& pair, const Channel& channel);

using numerics::RealFunction;

/// sum_k int W |f_k|^2 r^2 dr
double field_norm_weighted(const SpinorField& field, const RealFunction& weight,
                           std::span<const double> weight_breakpoints = {});
/// sum_k sum_shells a R^2 |f_k(R)|^2
double field_norm_weighted(const SpinorField& field,
                           std::span<const potentials::ShellMeasure> shells);
/// Regular weight plus shells.
double field_norm_weighted(const SpinorField& field, const potentials::RadialWeight& weight,
                           std::span<const potentials::ShellMeasure> shells = {});
/// Unweighted L^2 norm squared.
double field_norm(const SpinorField& field);

/// sum_k int w |f_k' - k f_k / r|^2 r^2 dr
double sigma_grad_norm_weighted(const SpinorField& field, const RealFunction& weight,
                                std::span<const double> weight_breakpoints = {});
/// Single channel versions used for per-channel reports.
double channel_norm_weighted(const RadialProfile& f, const RealFunction& weight,
                             std::span<const double> weight_breakpoints = {});
double channel_sigma_grad_norm_weighted(const RadialProfile& f, int k,
                                        const RealFunction& weight,
                                        std::span<const double> weight_breakpoints = {});

/// f_0(|x|) Omega_0 + f_{-2}(|x|) (sigma.x/|x|) Omega_0, Omega_0 = (1,0)/sqrt(4 pi).
std::array<Complex, 2> evaluate_spinor(const SpinorField& field, const std::array<double, 3>& x);

/// "exp:p,a" -> r^p e^{-a r}, "gauss:p,a" -> r^p e^{-a r^2}, optionally
/// "+"-separated sums.
RadialProfile parse_profile(std::string_view text);
/// "k=<int>:<profile>"
std::pair<int, RadialProfile> parse_field_term(std::string_view text);
SpinorField parse_field(std::span<const std::string> terms);

}  // namespace hardy::waves
