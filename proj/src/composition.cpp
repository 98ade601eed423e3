#include "compskip/composition.hpp"

#include <cmath>
#include <stdexcept>

#include "compskip/error.hpp"

namespace compskip {

void CompositionConfig::validate() const {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 1");
}

double CompositionConfig::weight(std::size_t /*index*/, std::size_t length) const {
  return 1.0 / static_cast<double>(length);
}

double phi(double x, double alpha) {
  if (alpha == 1.0) return x;
  return std::copysign(std::pow(std::fabs(x), alpha), x);
}

double phi_prime(double x, double alpha) {
  if (alpha == 1.0) return 1.0;
  if (x == 0.0) return 0.0;
  return alpha * std::pow(std::fabs(x), alpha - 1.0);
}

void sigma_into(std::span<const double> v, double alpha, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = phi(v[i], alpha);
}

std::vector<double> sigma(std::span<const double> v, double alpha) {
  std::vector<double> out(v.size());
  sigma_into(v, alpha, out);
  return out;
}

std::vector<double> sigma_jacobian_diag(std::span<const double> v, double alpha) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = phi_prime(v[i], alpha);
  return out;
}

namespace {

std::size_t checked_dim(std::span<const std::span<const double>> word_vectors) {
  if (word_vectors.empty()) throw std::invalid_argument("compose_phrase: no component vectors");
  const std::size_t d = word_vectors.front().size();
  for (const auto& v : word_vectors) {
    if (v.size() != d) throw std::invalid_argument("compose_phrase: dimension mismatch");
  }
  return d;
}

}  // namespace

std::vector<double> compose_phrase(std::span<const std::span<const double>> word_vectors,
                                   const CompositionConfig& config) {
  std::vector<double> out(checked_dim(word_vectors));
  compose_rows_into(
      word_vectors.size(), [&](std::size_t i) { return word_vectors[i]; }, config, out);
  return out;
}

std::vector<double> compose_weighted(std::span<const std::span<const double>> word_vectors,
                                     std::span<const double> weights, double alpha) {
  std::vector<double> out(checked_dim(word_vectors), 0.0);
  if (weights.size() != word_vectors.size()) {
    throw std::invalid_argument("compose_weighted: one weight per component required");
  }
  for (std::size_t i = 0; i < word_vectors.size(); ++i) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += weights[i] * phi(word_vectors[i][k], alpha);
    }
  }
  return out;
}

}  // namespace compskip
