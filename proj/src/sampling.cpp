#include "compskip/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "compskip/error.hpp"

namespace compskip {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

NoiseDistribution::NoiseDistribution(std::span<const std::uint64_t> counts, double exponent)
    : exponent_(exponent) {
  if (!(exponent > 0.0)) throw ConfigError("noise exponent must be > 0");
  if (counts.empty()) throw DataError("noise distribution over an empty table");

  probs_.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs_[i] = counts[i] == 0 ? 0.0 : std::pow(static_cast<double>(counts[i]), exponent);
    z_ += probs_[i];
  }
  if (!(z_ > 0.0)) throw DataError("noise distribution has no positive counts");

  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    probs_[i] /= z_;
    acc += probs_[i];
    cdf_[i] = acc;
  }
}

std::size_t NoiseDistribution::locate(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    // u landed in the rounding gap above the last cumulative value.
    std::size_t i = cdf_.size() - 1;
    while (probs_[i] == 0.0) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cdf_.begin());
}

std::int32_t NoiseDistribution::sample(Rng& rng) const {
  return static_cast<std::int32_t>(locate(uniform01(rng) * cdf_.back()));
}

std::int32_t NoiseDistribution::sample_excluding(Rng& rng, std::int32_t excluded) const {
  const auto ex = static_cast<std::size_t>(excluded);
  if (ex >= probs_.size()) return sample(rng);
  const double p_ex = probs_[ex];
  const double before = cdf_[ex] - p_ex;
  const double rest = cdf_.back() - p_ex;
  if (!(rest > 0.0) || p_ex >= 1.0) {
    throw DataError("negative sampling: excluded id carries all probability mass");
  }
  double u = uniform01(rng) * rest;
  if (u >= before) u += p_ex;
  std::size_t i = locate(u);
  if (i == ex) {
    // Rounding put u on the excluded slot's boundary; take the nearest
    // neighbour that has mass.
    std::size_t j = i + 1;
    while (j < probs_.size() && probs_[j] == 0.0) ++j;
    if (j == probs_.size()) {
      j = i;
      while (j > 0 && (j == i || probs_[j] == 0.0)) --j;
    }
    i = j;
  }
  return static_cast<std::int32_t>(i);
}

NoiseDistribution build_noise_distribution(std::span<const std::uint64_t> counts, double exponent) {
  return NoiseDistribution(counts, exponent);
}

void sample_negatives_into(const NoiseDistribution& dist, Rng& rng, std::size_t k,
                           std::optional<std::int32_t> exclude, std::vector<std::int32_t>& out) {
  if (k < 1) throw ConfigError("number of negatives must be >= 1");
  for (std::size_t slot = 0; slot < k; ++slot) {
    std::int32_t id = dist.sample(rng);
    int retries = 0;
    while (exclude && id == *exclude && retries < kExcludeRetryLimit) {
      id = dist.sample(rng);
      ++retries;
    }
    if (exclude && id == *exclude) id = dist.sample_excluding(rng, *exclude);
    out.push_back(id);
  }
}

std::vector<std::int32_t> sample_negatives(const NoiseDistribution& dist, Rng& rng, std::size_t k,
                                           std::optional<std::int32_t> exclude) {
  std::vector<std::int32_t> out;
  out.reserve(k);
  sample_negatives_into(dist, rng, k, exclude, out);
  return out;
}

}  // namespace compskip
