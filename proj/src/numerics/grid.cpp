#include "hardy/numerics.hpp"

#include <cmath>

#include "hardy/errors.hpp"

namespace hardy::numerics {

std::string_view to_string(GridTransform transform) {
  switch (transform) {
    case GridTransform::log_uniform:
      return "log_uniform";
    case GridTransform::algebraic:
      return "algebraic";
  }
  return "unknown";
}

RadialGrid::RadialGrid(std::vector<double> nodes, GridTransform transform)
    : nodes_(std::move(nodes)), transform_(transform) {
  if (nodes_.size() < 2) throw InputError("radial grid needs at least two nodes");
  if (!(nodes_.front() > 0.0)) throw InputError("radial grid nodes must be positive");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw InputError("radial grid nodes must be strictly increasing");
  }
}

RadialGrid RadialGrid::log_uniform(double r_min, double r_max, std::size_t n) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw InputError("need 0 < r_min < r_max");
  if (n < 2) throw InputError("radial grid needs at least two nodes");
  std::vector<double> nodes(n);
  const double t0 = std::log(r_min);
  const double dt = (std::log(r_max) - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = std::exp(t0 + dt * static_cast<double>(i));
  nodes.front() = r_min;
  nodes.back() = r_max;
  return RadialGrid(std::move(nodes), GridTransform::log_uniform);
}

RadialGrid RadialGrid::algebraic(double r_min, double r_max, std::size_t n) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw InputError("need 0 < r_min < r_max");
  if (n < 2) throw InputError("radial grid needs at least two nodes");
  // r(x) = s x / (1 - x); choose s and the x-range so both ends are hit.
  const double s = std::sqrt(r_min * r_max);
  const double x0 = r_min / (s + r_min);
  const double x1 = r_max / (s + r_max);
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
    nodes[i] = s * x / (1.0 - x);
  }
  nodes.front() = r_min;
  nodes.back() = r_max;
  return RadialGrid(std::move(nodes), GridTransform::algebraic);
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes, GridTransform transform) {
  return RadialGrid(std::move(nodes), transform);
}

RadialGrid RadialGrid::refined() const {
  const std::size_t n = 2 * nodes_.size();
  if (transform_ == GridTransform::algebraic) return algebraic(r_min() / 2, r_max() * 2, n);
  return log_uniform(r_min() / 2, r_max() * 2, n);
}

}  // namespace hardy::numerics
