#include "compskip/model.hpp"

#include <cmath>
#include <string>

#include "compskip/error.hpp"

namespace compskip {

bool EmbeddingMatrix::all_finite() const {
  for (double x : values_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Baseline: return "baseline";
    case Mode::Compositional: return "compositional";
    case Mode::Positional: return "positional";
    case Mode::CompositionalPositional: return "compositional+positional";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::Baseline, Mode::Compositional, Mode::Positional,
                 Mode::CompositionalPositional}) {
    if (to_string(m) == name) return m;
  }
  if (name == "positional+compositional") return Mode::CompositionalPositional;
  return std::nullopt;
}

int bank_for_offset(int offset, int window) {
  if (offset == 0 || offset < -window || offset > window) {
    throw std::out_of_range("relative offset " + std::to_string(offset) + " outside window");
  }
  return offset < 0 ? offset + window : offset + window - 1;
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (word_negatives < 1) throw ConfigError("word negatives must be >= 1");
  if (phrase_negatives < 1) throw ConfigError("phrase negatives must be >= 1");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be >= 0");
  composition().validate();
  if (min_count < 1) throw ConfigError("min-count must be >= 1");
  if (phrase_min_count < 1) throw ConfigError("phrase-min-count must be >= 1");
  if (!(lr_start > 0.0) || !std::isfinite(lr_start)) throw ConfigError("learning rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(subsample >= 0.0)) throw ConfigError("subsample threshold must be >= 0");
  if (!(noise_exponent > 0.0)) throw ConfigError("noise exponent must be > 0");
}

namespace {

std::size_t bank_index(std::size_t banks, int offset, int window) {
  return banks == 1 ? 0 : static_cast<std::size_t>(bank_for_offset(offset, window));
}

}  // namespace

EmbeddingMatrix& ModelParams::word_bank(int offset) {
  return output_words[bank_index(output_words.size(), offset, window)];
}
const EmbeddingMatrix& ModelParams::word_bank(int offset) const {
  return output_words[bank_index(output_words.size(), offset, window)];
}
EmbeddingMatrix& ModelParams::phrase_bank(int offset) {
  return output_phrase_words.at(bank_index(output_phrase_words.size(), offset, window));
}
const EmbeddingMatrix& ModelParams::phrase_bank(int offset) const {
  return output_phrase_words.at(bank_index(output_phrase_words.size(), offset, window));
}

void ModelParams::validate() const {
  const std::size_t rows = input_words.rows();
  const std::size_t d = input_words.dim();
  if (rows == 0 || d == 0) throw DataError("model: empty input matrix");
  if (window < 1) throw DataError("model: window must be >= 1");
  const std::size_t banks = is_positional(mode) ? 2 * static_cast<std::size_t>(window) : 1;
  if (output_words.size() != banks) throw DataError("model: wrong number of output banks for mode");
  const std::size_t phrase_banks = uses_phrases(mode) ? banks : 0;
  if (output_phrase_words.size() != phrase_banks) {
    throw DataError("model: wrong number of compositional banks for mode");
  }
  auto check = [&](const EmbeddingMatrix& m) {
    if (m.rows() != rows || m.dim() != d) throw DataError("model: bank shape mismatch");
  };
  for (const auto& m : output_words) check(m);
  for (const auto& m : output_phrase_words) check(m);
}

bool ModelParams::all_finite() const {
  if (!input_words.all_finite()) return false;
  for (const auto& m : output_words) {
    if (!m.all_finite()) return false;
  }
  for (const auto& m : output_phrase_words) {
    if (!m.all_finite()) return false;
  }
  return true;
}

ModelParams init_params(std::size_t vocab_size, const TrainConfig& config, Rng& rng) {
  if (vocab_size < 1) throw ConfigError("cannot initialise a model over an empty vocabulary");
  config.validate();
  ModelParams params;
  params.mode = config.mode;
  params.window = config.window;
  params.input_words = EmbeddingMatrix(vocab_size, config.dim);
  const double scale = 1.0 / static_cast<double>(config.dim);
  for (double& x : params.input_words.values()) x = (uniform01(rng) - 0.5) * scale;

  const std::size_t banks = is_positional(config.mode) ? 2 * static_cast<std::size_t>(config.window) : 1;
  params.output_words.assign(banks, EmbeddingMatrix(vocab_size, config.dim));
  if (uses_phrases(config.mode)) {
    params.output_phrase_words.assign(banks, EmbeddingMatrix(vocab_size, config.dim));
  }
  return params;
}

}  // namespace compskip
