#pragma once

// Phrase composition: v_p = sum_i l_i * sigma(v_{w_i}), where sigma applies
// phi(x) = sign(x) |x|^alpha to every dimension and l_i = 1/n_p.

#include <cstddef>
#include <span>
#include <vector>

namespace compskip {

enum class WeightScheme {
  Uniform,  // l_i = 1/n_p
};

struct CompositionConfig {
  double alpha = 1.0;
  WeightScheme weights = WeightScheme::Uniform;

  /// Throws ConfigError unless alpha >= 1.
  void validate() const;

  /// Weight of the component at `index` in a phrase of `length` words.
  double weight(std::size_t index, std::size_t length) const;

  bool operator==(const CompositionConfig&) const = default;
};

double phi(double x, double alpha);

/// alpha |x|^(alpha-1). At x = 0 this is 1 for alpha = 1 and 0 for alpha > 1.
double phi_prime(double x, double alpha);

std::vector<double> sigma(std::span<const double> v, double alpha);
void sigma_into(std::span<const double> v, double alpha, std::span<double> out);

/// Diagonal of the Jacobian of sigma at v.
std::vector<double> sigma_jacobian_diag(std::span<const double> v, double alpha);

/// Composes component word vectors with the configured weights. Throws
/// std::invalid_argument on an empty list or mismatched dimensions.
std::vector<double> compose_phrase(std::span<const std::span<const double>> word_vectors,
                                   const CompositionConfig& config);

/// Same composition with explicit per-component weights.
std::vector<double> compose_weighted(std::span<const std::span<const double>> word_vectors,
                                     std::span<const double> weights, double alpha);

/// Allocation-free composition used by the trainer: `row(i)` yields the
/// i-th component vector. Components are summed left to right; the uniform
/// scheme divides the sum by n once, so alpha = 1 gives the exact mean.
template <class RowFn>
void compose_rows_into(std::size_t n, RowFn&& row, const CompositionConfig& config,
                       std::span<double> out) {
  for (double& x : out) x = 0.0;
  const double alpha = config.alpha;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> v = row(i);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += phi(v[k], alpha);
  }
  const double denom = static_cast<double>(n);
  for (double& x : out) x /= denom;
}

}  // namespace compskip
