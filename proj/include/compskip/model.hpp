#pragma once

// Trainable parameters for the four model variants.
//
//   baseline                 v (input), one v' bank
//   positional               v, 2c v' banks (one per relative offset)
//   compositional            v, one v' bank, one v'' bank for phrase composition
//   compositional+positional v, 2c v' banks, 2c v'' banks
//
// Phrase vectors are never stored; they are composed from word rows.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compskip/composition.hpp"
#include "compskip/sampling.hpp"

namespace compskip {

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), values_(rows * dim) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const;

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

enum class Mode { Baseline, Compositional, Positional, CompositionalPositional };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

constexpr bool uses_phrases(Mode mode) {
  return mode == Mode::Compositional || mode == Mode::CompositionalPositional;
}
constexpr bool is_positional(Mode mode) {
  return mode == Mode::Positional || mode == Mode::CompositionalPositional;
}

/// Bank index for a relative offset: -c..-1 map to 0..c-1, +1..+c to c..2c-1.
int bank_for_offset(int offset, int window);

struct TrainConfig {
  std::size_t dim = 300;
  int window = 5;
  std::size_t word_negatives = 10;
  std::size_t phrase_negatives = 10;
  double beta = 1.0;
  double alpha = 1.0;
  Mode mode = Mode::Baseline;
  std::uint64_t min_count = 20;
  std::uint64_t phrase_min_count = 5;
  bool include_singletons = false;
  bool lowercase = true;
  bool plain_text = false;
  double lr_start = 0.025;
  int epochs = 5;
  std::uint64_t seed = 1;
  int workers = 1;
  double subsample = 0.0;  // word2vec-style threshold; 0 disables
  double noise_exponent = kDefaultNoiseExponent;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  CompositionConfig composition() const { return CompositionConfig{alpha, WeightScheme::Uniform}; }

  bool operator==(const TrainConfig&) const = default;
};

struct ModelParams {
  EmbeddingMatrix input_words;
  std::vector<EmbeddingMatrix> output_words;
  std::vector<EmbeddingMatrix> output_phrase_words;  // v''; empty unless uses_phrases(mode)
  Mode mode = Mode::Baseline;
  int window = 1;

  std::size_t vocab_size() const noexcept { return input_words.rows(); }
  std::size_t dim() const noexcept { return input_words.dim(); }

  /// v' bank for a context at relative `offset` (ignored in non-positional modes).
  EmbeddingMatrix& word_bank(int offset);
  const EmbeddingMatrix& word_bank(int offset) const;
  /// v'' bank for a context phrase at relative `offset`.
  EmbeddingMatrix& phrase_bank(int offset);
  const EmbeddingMatrix& phrase_bank(int offset) const;

  /// Checks the bank layout against mode and window. Throws DataError.
  void validate() const;
  bool all_finite() const;

  bool operator==(const ModelParams&) const = default;
};

/// Input rows ~ U(-0.5/d, 0.5/d); every output bank starts at zero.
ModelParams init_params(std::size_t vocab_size, const TrainConfig& config, Rng& rng);

}  // namespace compskip
