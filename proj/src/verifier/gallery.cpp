#include <algorithm>
#include <numbers>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/verifier.hpp"

namespace hardy::verifier {

std::vector<SpinorField> random_field_gallery(std::size_t count, std::uint64_t seed,
                                              const GalleryOptions& options) {
  if (options.channels.empty()) throw InputError("random_field_gallery: no channels");
  if (!(options.a_min > 0.0) || !(options.a_max >= options.a_min))
    throw InputError("random_field_gallery: need 0 < a_min <= a_max");
  const int max_channels =
      std::clamp(options.max_channels_per_field, 1, static_cast<int>(options.channels.size()));

  // Draws are made through explicit integer/real conversions of the raw
  // engine output so the gallery does not depend on the standard library's
  // distribution implementations.
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const auto below = [&rng](std::uint64_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<SpinorField> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto channels = options.channels;
    // Fisher-Yates on the first `n` slots.
    const int n = 1 + static_cast<int>(below(static_cast<std::uint64_t>(max_channels)));
    for (int j = 0; j < n; ++j) {
      const std::size_t pick = j + below(channels.size() - j);
      std::swap(channels[j], channels[pick]);
    }
    SpinorField field;
    for (int j = 0; j < n; ++j) {
      const int k = channels[j];
      const double p = waves::Channel(k).l() + static_cast<double>(below(2));
      const double a = options.a_min + (options.a_max - options.a_min) * uniform();
      const double amplitude = 0.2 + 1.8 * uniform();
      const double phase = 2.0 * std::numbers::pi * uniform();
      field.add(k, RadialProfile::exp(p, a, std::polar(amplitude, phase)));
    }
    out.push_back(std::move(field));
  }
  return out;
}

}  // namespace hardy::verifier
