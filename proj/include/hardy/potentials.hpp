#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hardy::potentials {

// ---------------------------------------------------------------------------
// Radial components
// ---------------------------------------------------------------------------

struct Zero {};

/// nu / r
struct Coulomb {
  double nu = 0.0;
};

/// a * r^p
struct Power {
  double a = 0.0;
  double p = 0.0;
};

/// Piecewise-linear interpolation of tabulated (r, value) pairs, zero outside
/// the tabulated range.
struct Table {
  std::string source;
  std::shared_ptr<const std::vector<double>> r;
  std::shared_ptr<const std::vector<double>> value;
};

/// (c / eps) * bump((r - radius) / eps), with the unit-mass bump
/// exp(-1 / (1 - t^2)) / Z supported on [-1, 1].
struct MollifiedShell {
  double c = 0.0;
  double eps = 1.0;
  double radius = 1.0;
};

/// Normalized bump used by MollifiedShell.
double bump(double t);

class PotentialComponent {
 public:
  using Kind = std::variant<Zero, Coulomb, Power, Table, MollifiedShell>;

  PotentialComponent() = default;
  explicit PotentialComponent(Kind kind);

  const Kind& kind() const noexcept { return kind_; }
  double operator()(double r) const;

  /// Radii where the component has kinks or support edges.
  std::vector<double> breakpoints() const;
  bool is_zero() const;
  /// True when every parameter makes the component a nonnegative weight.
  bool is_nonnegative_weight() const;
  /// V^alpha(r) = alpha V(alpha r).
  PotentialComponent scaled(double alpha) const;

 private:
  Kind kind_ = Zero{};
};

/// Finite sum of components.
class RadialWeight {
 public:
  RadialWeight() = default;
  explicit RadialWeight(std::vector<PotentialComponent> terms);

  static RadialWeight coulomb(double nu);

  std::span<const PotentialComponent> terms() const noexcept { return terms_; }
  double operator()(double r) const;
  std::vector<double> breakpoints() const;
  bool is_zero() const;
  RadialWeight scaled(double alpha) const;

 private:
  std::vector<PotentialComponent> terms_;
};

/// Term-wise sum of two weights.
RadialWeight combined(const RadialWeight& a, const RadialWeight& b);

/// Radial measure a * delta(t - radius) dt: on radial functions it acts as
/// a * R^2 * f(R) after the angular integration, i.e. the surface integral
/// over the sphere of radius R weighted by a.
struct ShellMeasure {
  double radius = 1.0;
  double mass = 1.0;
};

struct PotentialPair {
  RadialWeight v1;
  std::vector<ShellMeasure> v1_shells;
  RadialWeight v2;
  double c1 = 1.0;
  double c2 = 1.0;

  /// Structural checks: nonnegative weights, valid shells, v2 bounded near
  /// every shell radius. Throws InputError / HypothesisError.
  void validate() const;
  bool has_shells() const noexcept { return !v1_shells.empty(); }
  /// V1 + V2 regular parts.
  double regular_sum(double r) const { return v1(r) + v2(r); }
};

// ---------------------------------------------------------------------------
// Spec grammar
// ---------------------------------------------------------------------------

PotentialComponent parse_component(std::string_view text);

struct V1Slot {
  RadialWeight regular;
  std::vector<ShellMeasure> shells;
};

/// component *("+" component) *("+" "shell:"a"@"R), whitespace tolerant.
V1Slot parse_v1_slot(std::string_view text);
/// component *("+" component); shells are rejected.
RadialWeight parse_weight(std::string_view text);

std::string to_string(const PotentialComponent& component);
std::string to_string(const RadialWeight& weight);
std::string to_string(const V1Slot& slot);

/// Two-column CSV (r, value) with strictly increasing r; an optional
/// non-numeric header line is skipped.
Table load_table(const std::string& path);

// ---------------------------------------------------------------------------
// Hardy constants
// ---------------------------------------------------------------------------

/// Channel average. For exponent e = 2(k+1):
///   k >= 0 : r^-e [ int_0^r W s^e ds + sum a R^e 1{R <= r} ]
///   k <= -2: r^-e [ int_r^inf W s^e ds + sum a R^e 1{r <= R} ]
/// k = 0 gives the A+ integrand and k = -2 the A- integrand.
double channel_average(const RadialWeight& weight, std::span<const ShellMeasure> shells, int k,
                       double r);

double a_plus(const PotentialPair& pair);
double a_minus(const PotentialPair& pair);
double a_k(const PotentialPair& pair, int k);

struct TildeConstants {
  double plus = 0.0;
  double minus = 0.0;
};

/// Separate suprema for V1 and V2, summed.
TildeConstants tilde_constants(const PotentialPair& pair);

struct HardyConstants {
  double a_plus = 0.0;
  double a_minus = 0.0;
  double a_tilde_plus = 0.0;
  double a_tilde_minus = 0.0;
  std::map<int, double> per_channel;

  /// max{A+^2, A-^2}
  double theorem_constant() const;
  /// A_k, computed on demand when absent from the table.
  double channel(const PotentialPair& pair, int k);
};

HardyConstants hardy_constants(const PotentialPair& pair, std::span<const int> channels = {});

/// Throws NotInClassA unless both A+ and A- are finite.
void check_class_a(const PotentialPair& pair);

PotentialPair scale_pair(const PotentialPair& pair, double alpha);

}  // namespace hardy::potentials
