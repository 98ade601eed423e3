#pragma once

// Smoothed unigram noise distribution and negative sampling.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace compskip {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Independent seed for stream `stream` derived from a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr double kDefaultNoiseExponent = 0.75;
inline constexpr int kExcludeRetryLimit = 100;

/// P(i) = count(i)^exponent / Z, sampled by binary search over the CDF.
class NoiseDistribution {
 public:
  NoiseDistribution(std::span<const std::uint64_t> counts, double exponent = kDefaultNoiseExponent);

  std::size_t size() const noexcept { return probs_.size(); }
  double probability(std::size_t id) const { return probs_.at(id); }
  std::span<const double> probabilities() const noexcept { return probs_; }
  double normalizer() const noexcept { return z_; }
  double exponent() const noexcept { return exponent_; }

  std::int32_t sample(Rng& rng) const;

  /// Draw conditioned on the result differing from `excluded`: identical in
  /// distribution to rejection, but takes a single draw. Requires that some
  /// other id has positive mass.
  std::int32_t sample_excluding(Rng& rng, std::int32_t excluded) const;

 private:
  std::size_t locate(double u) const;

  std::vector<double> probs_;
  std::vector<double> cdf_;
  double z_ = 0.0;
  double exponent_ = kDefaultNoiseExponent;
};

NoiseDistribution build_noise_distribution(std::span<const std::uint64_t> counts,
                                           double exponent = kDefaultNoiseExponent);

/// Appends k draws to `out`. Draws equal to `exclude` are redrawn, up to
/// kExcludeRetryLimit times per slot; after that the slot is filled from the
/// conditional distribution, or DataError if `exclude` holds all the mass.
void sample_negatives_into(const NoiseDistribution& dist, Rng& rng, std::size_t k,
                           std::optional<std::int32_t> exclude, std::vector<std::int32_t>& out);

std::vector<std::int32_t> sample_negatives(const NoiseDistribution& dist, Rng& rng, std::size_t k,
                                           std::optional<std::int32_t> exclude = std::nullopt);

}  // namespace compskip
