#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/verifier.hpp"

namespace hardy::verifier {

namespace {

using Point = std::vector<double>;

struct Box {
  const std::vector<double>& lower;
  const std::vector<double>& upper;

  void clamp(Point& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  }
};

struct Vertex {
  Point x;
  double value;  // minimized, i.e. -ratio
};

// Nelder-Mead with standard coefficients; points are projected onto the box.
Vertex nelder_mead(const std::function<double(const Point&)>& f, Point start, const Box& box,
                   int max_evaluations, double tolerance, int& evaluations) {
  const std::size_t n = start.size();
  std::vector<Vertex> simplex;
  const auto eval = [&](Point x) {
    box.clamp(x);
    ++evaluations;
    const double v = f(x);
    return Vertex{std::move(x), v};
  };
  box.clamp(start);
  simplex.push_back(eval(start));
  for (std::size_t i = 0; i < n; ++i) {
    Point x = start;
    const double step = 0.1 * (box.upper[i] - box.lower[i]);
    x[i] = x[i] + step <= box.upper[i] ? x[i] + step : x[i] - step;
    simplex.push_back(eval(x));
  }
  int used = static_cast<int>(n) + 1;
  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.value < b.value; };
  while (used < max_evaluations) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (std::abs(simplex.back().value - simplex.front().value) <=
        tolerance * (1.0 + std::abs(simplex.front().value)))
      break;
    Point centroid(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[j].x[i] / static_cast<double>(n);
    const auto along = [&](double t) {
      Point x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex.back().x[i] - centroid[i]);
      return x;
    };
    const Vertex reflected = eval(along(-1.0));
    ++used;
    if (reflected.value < simplex.front().value) {
      const Vertex expanded = eval(along(-2.0));
      ++used;
      simplex.back() = expanded.value < reflected.value ? expanded : reflected;
    } else if (reflected.value < simplex[n - 1].value) {
      simplex.back() = reflected;
    } else {
      const bool outside = reflected.value < simplex.back().value;
      const Vertex contracted = eval(along(outside ? -0.5 : 0.5));
      ++used;
      if (contracted.value < std::min(reflected.value, simplex.back().value)) {
        simplex.back() = contracted;
      } else {
        for (std::size_t j = 1; j <= n; ++j) {
          Point x(n);
          for (std::size_t i = 0; i < n; ++i)
            x[i] = simplex[0].x[i] + 0.5 * (simplex[j].x[i] - simplex[0].x[i]);
          simplex[j] = eval(x);
          ++used;
        }
      }
    }
  }
  return *std::min_element(simplex.begin(), simplex.end(), by_value);
}

double ratio_with(const PotentialPair& pair, potentials::HardyConstants& constants, double gamma,
                  int k, const RadialProfile& f) {
  if (f.kind() == RadialProfile::Kind::closed_form && f.terms().empty())
    throw InputError("extremize_ratio: degenerate (zero) profile family");
  const auto report = verify_theorem(pair, constants, SpinorField(k, f), gamma);
  return report.vacuous ? 0.0 : report.ratio;
}

}  // namespace

ProfileFamily ProfileFamily::exp_family(double s_max, double a_min, double a_max) {
  ProfileFamily f;
  f.name = "exp";
  f.lower = {0.0, a_min};
  f.upper = {s_max, a_max};
  f.make = [](int k, std::span<const double> x) {
    return RadialProfile::exp(waves::Channel(k).l() + x[0], x[1]);
  };
  return f;
}

ProfileFamily ProfileFamily::gauss_family(double s_max, double a_min, double a_max) {
  ProfileFamily f;
  f.name = "gauss";
  f.lower = {0.0, a_min};
  f.upper = {s_max, a_max};
  f.make = [](int k, std::span<const double> x) {
    return RadialProfile::gauss(waves::Channel(k).l() + x[0], x[1]);
  };
  return f;
}

double theorem_ratio(const PotentialPair& pair, double gamma, int k, const RadialProfile& f) {
  auto constants = potentials::hardy_constants(pair);
  return ratio_with(pair, constants, gamma, k, f);
}

ExtremizeResult extremize_ratio(const PotentialPair& pair, double gamma,
                                const ProfileFamily& family, std::span<const int> k_set,
                                const ExtremizeOptions& options) {
  if (k_set.empty()) throw InputError("extremize_ratio: empty channel set");
  if (family.lower.empty() || family.lower.size() != family.upper.size() || !family.make)
    throw InputError("extremize_ratio: malformed family");
  for (std::size_t i = 0; i < family.lower.size(); ++i) {
    if (!(family.lower[i] <= family.upper[i])) throw InputError("extremize_ratio: empty box");
  }
  for (int k : k_set) waves::Channel{k};

  auto constants = potentials::hardy_constants(pair, k_set);
  const Box box{family.lower, family.upper};
  std::mt19937_64 rng(options.seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  ExtremizeResult result;
  result.best_ratio = -1.0;
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    Point start(family.lower.size());
    for (std::size_t i = 0; i < start.size(); ++i) {
      const double t = restart == 0 ? 0.5 : uniform();
      start[i] = family.lower[i] + t * (family.upper[i] - family.lower[i]);
    }
    for (int k : k_set) {
      const auto objective = [&](const Point& x) {
        return -ratio_with(pair, constants, gamma, k, family.make(k, x));
      };
      const auto best = nelder_mead(objective, start, box, options.max_evaluations,
                                    options.tolerance, result.evaluations);
      if (-best.value > result.best_ratio) {
        result.best_ratio = -best.value;
        result.best_channel = k;
        result.best_parameters = best.x;
      }
    }
    result.history.push_back(result.best_ratio);
  }
  return result;
}

}  // namespace hardy::verifier
