#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardy/partial_waves.hpp"
#include "hardy/potentials.hpp"

namespace hardy::verifier {

using potentials::PotentialPair;
using waves::RadialProfile;
using waves::SpinorField;

struct GapParameters {
  double m = 1.0;
  double lambda = 0.0;
  double gamma = 0.0;

  /// Throws InputError unless m > 0, -m < lambda < m and gamma >= 0.
  void validate() const;
};

/// Per-channel pieces of an inequality. `rhs` uses the constant of the
/// checked inequality; `rhs_sharp` uses the channel constant A_k^2.
struct ChannelTerms {
  double lhs = 0.0;
  double grad = 0.0;  // int |f' - k f / r|^2 w r^2 dr with the inequality's weight
  double mass = 0.0;  // int |f|^2 r^2 dr
  double rhs = 0.0;
  double a_k = 0.0;
  double rhs_sharp = 0.0;
  bool satisfied = true;  // lhs <= rhs_sharp within tolerance
};

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs; 0 when both vanish or when the report is vacuous.
  double ratio = 0.0;
  /// Constant in front of the gradient term.
  double constant = 0.0;
  double tolerance = 1e-8;
  std::map<int, ChannelTerms> per_channel;
  bool satisfied = true;
  /// Right-hand side infinite: the inequality holds trivially.
  bool vacuous = false;
  bool lhs_infinite = false;
};

/// sum_k int V1 |f_k|^2 r^2 dr + sum_shells sum_k a R^2 |f_k(R)|^2
/// (+inf when the integral diverges).
double hardy_lhs(const PotentialPair& pair, const SpinorField& field);

/// max{A+^2, A-^2} int |sigma.grad phi|^2 / (V2 + gamma) + gamma int |phi|^2
/// (+inf when not integrable).
double hardy_rhs_theorem(const PotentialPair& pair, const SpinorField& field, double gamma);

/// Theorem check with a per-channel breakdown; each channel is also checked
/// against its sharper constant A_k^2.
InequalityReport verify_theorem(const PotentialPair& pair, const SpinorField& field, double gamma,
                                double tolerance = 1e-8);
/// Same, reusing (and extending) precomputed constants of `pair`.
InequalityReport verify_theorem(const PotentialPair& pair, potentials::HardyConstants& constants,
                                const SpinorField& field, double gamma, double tolerance = 1e-8);

/// Midpoint of (lambda_min, m), lambda_min = max(0, m (c1 - c2) / (c1 + c2)),
/// so that c1 / c2 < (m + lambda) / (m - lambda).
double select_lambda(double c1, double c2, double m);

/// Inequality used for the norm equivalence:
///   eps int w1 |phi|^2 <= int |sigma.grad phi|^2 / (m + w2 - lambda_w)
///                         + int (m - w1 + lambda_w) |phi|^2,
/// eps = 1 / (c1 c2 max A^2) - 1 and lambda_w = select_lambda((1 + eps) c1, c2, m).
struct NormEquivalenceCheck {
  bool evaluated = false;  // false at the threshold, where eps = 0
  double epsilon = 0.0;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
};

struct CorollaryReport : InequalityReport {
  double m = 1.0;
  double lambda = 0.0;
  /// 1 / max{A+^2, A-^2}
  double threshold = 0.0;
  NormEquivalenceCheck norm_equivalence;
};

/// Checks int c1 V1 |phi|^2 <= int |sigma.grad phi|^2 / (m + c2 V2 - lambda)
///                               + (m + lambda) int |phi|^2.
/// Throws HypothesisError when c1 c2 > 1 / max{A+^2, A-^2}.
CorollaryReport verify_corollary(const PotentialPair& pair, const SpinorField& field, double m,
                                 std::optional<double> lambda = std::nullopt,
                                 double tolerance = 1e-8);
CorollaryReport verify_corollary(const PotentialPair& pair, potentials::HardyConstants& constants,
                                 const SpinorField& field, double m,
                                 std::optional<double> lambda = std::nullopt,
                                 double tolerance = 1e-8);

/// Throws HypothesisError("hypothesis violated ...") when c1 c2 exceeds the
/// threshold; returns the threshold otherwise.
double check_corollary_hypothesis(const PotentialPair& pair,
                                  const potentials::HardyConstants& constants);

// ---------------------------------------------------------------------------
// Random admissible fields
// ---------------------------------------------------------------------------

struct GalleryOptions {
  std::vector<int> channels{-4, -3, -2, 0, 1, 2, 3};
  double a_min = 0.3;
  double a_max = 3.0;
  int max_channels_per_field = 3;
};

/// Fields with profiles c r^p e^{-a r}, p in {l, l + 1}, on 1..max random
/// channels. Deterministic in the seed.
std::vector<SpinorField> random_field_gallery(std::size_t count, std::uint64_t seed,
                                              const GalleryOptions& options = {});

// ---------------------------------------------------------------------------
// Ratio extremization
// ---------------------------------------------------------------------------

/// Parametrized single-channel profile family over a box.
struct ProfileFamily {
  std::string name;
  std::vector<double> lower;
  std::vector<double> upper;
  /// Builds the profile for channel k from parameters in the box.
  std::function<RadialProfile(int k, std::span<const double>)> make;

  /// r^(l + s) e^{-a r}, s in [0, s_max], a in [a_min, a_max].
  static ProfileFamily exp_family(double s_max = 4.0, double a_min = 0.2, double a_max = 5.0);
  /// r^(l + s) e^{-a r^2}.
  static ProfileFamily gauss_family(double s_max = 4.0, double a_min = 0.05, double a_max = 5.0);
};

struct ExtremizeOptions {
  int restarts = 4;
  int max_evaluations = 200;  // per restart and channel
  std::uint64_t seed = 20240611;
  double tolerance = 1e-10;
};

struct ExtremizeResult {
  double best_ratio = 0.0;
  int best_channel = 0;
  std::vector<double> best_parameters;
  /// Best ratio found after each restart (nondecreasing).
  std::vector<double> history;
  int evaluations = 0;
};

/// Ratio lhs / rhs of the theorem for a single-channel field.
double theorem_ratio(const PotentialPair& pair, double gamma, int k, const RadialProfile& f);

/// Restarted Nelder-Mead maximizing the theorem ratio over the family on each
/// channel of k_set.
ExtremizeResult extremize_ratio(const PotentialPair& pair, double gamma,
                                const ProfileFamily& family, std::span<const int> k_set,
                                const ExtremizeOptions& options = {});

// ---------------------------------------------------------------------------
// Mollified shell in V2
// ---------------------------------------------------------------------------

struct MollifiedRow {
  double eps = 0.0;
  double lhs = 0.0;            // c1 R^2 |f(R)|^2 summed over channels
  double bulk = 0.0;           // outside 1 - eps < r < 1 + eps, weight 1 / (m - lambda)
  double annulus = 0.0;        // inside, weight 1 / (m + w2 - lambda)
  double annulus_bound = 0.0;  // inside, weight 1 / (m + c2 / eps - lambda)
  double mass = 0.0;           // (m + lambda) int |phi|^2
  double rhs = 0.0;            // bulk + annulus + mass
  double ratio = 0.0;
  bool vacuous = false;        // shell term vanishes
};

struct MollifiedReport {
  double c1 = 0.0;
  double c2 = 0.0;
  double radius = 1.0;
  double m = 1.0;
  double lambda = 0.0;
  std::vector<MollifiedRow> rows;
  /// annulus(eps_{i+1}) / annulus(eps_i)
  std::vector<double> annulus_ratios;
};

/// V1 = shell of mass c1 at `radius`, w2 = (c2 / eps) bump((r - 1) / eps).
MollifiedReport mollified_delta_experiment(double c1, double c2, double radius,
                                           std::span<const double> eps_list,
                                           const SpinorField& field, double m = 1.0,
                                           std::optional<double> lambda = std::nullopt);

}  // namespace hardy::verifier
