#pragma once

// Small models and corpora shared by the unit tests.

#include <random>
#include <string>
#include <vector>

#include "compskip/corpus.hpp"
#include "compskip/model.hpp"

namespace fixture {

inline const std::vector<compskip::Mode>& all_modes() {
  static const std::vector<compskip::Mode> modes = {
      compskip::Mode::Baseline, compskip::Mode::Compositional, compskip::Mode::Positional,
      compskip::Mode::CompositionalPositional};
  return modes;
}

/// Model with every entry drawn from +-[lo, hi] so no entry sits near the
/// kink of phi at zero.
inline compskip::ModelParams random_params(std::size_t vocab, std::size_t dim, compskip::Mode mode,
                                           int window, std::mt19937_64& rng, double lo = 0.05,
                                           double hi = 1.0) {
  compskip::TrainConfig config;
  config.dim = dim;
  config.window = window;
  config.mode = mode;
  compskip::Rng init(rng());
  compskip::ModelParams p = compskip::init_params(vocab, config, init);
  std::uniform_real_distribution<double> mag(lo, hi);
  auto fill = [&](compskip::EmbeddingMatrix& m) {
    for (double& x : m.values()) x = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
  };
  fill(p.input_words);
  for (auto& m : p.output_words) fill(m);
  for (auto& m : p.output_phrase_words) fill(m);
  return p;
}

/// Chunked corpus over a small vocabulary with recurring two-word NPs.
inline std::vector<compskip::ChunkedSentence> toy_corpus(std::size_t sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> nouns = {"cat", "dog", "car", "tree", "house", "bird"};
  const std::vector<std::string> adjs = {"red", "big", "old", "small"};
  const std::vector<std::string> verbs = {"sees", "likes", "finds", "moves"};
  std::vector<compskip::ChunkedSentence> out;
  for (std::size_t s = 0; s < sentences; ++s) {
    compskip::ChunkedSentence sentence;
    sentence.chunks.push_back({"NP", {adjs[rng() % adjs.size()], nouns[rng() % nouns.size()]}});
    sentence.chunks.push_back({"VP", {verbs[rng() % verbs.size()]}});
    sentence.chunks.push_back({"NP", {"the", nouns[rng() % nouns.size()]}});
    if (rng() % 2) sentence.chunks.push_back({"O", {"today"}});
    out.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace fixture
