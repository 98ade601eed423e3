#pragma once

// Stochastic gradient ascent on E = E_w + beta * E_p.
//
// Both step functions compute every coefficient and gradient from the
// parameters as they were on entry and only then write, so one call applies
// exactly lr times the gradient of its objective term, even when ids repeat.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "compskip/checkpoint.hpp"
#include "compskip/composition.hpp"
#include "compskip/corpus.hpp"
#include "compskip/model.hpp"
#include "compskip/sampling.hpp"
#include "compskip/training_state.hpp"

namespace compskip {

inline constexpr double kLearningRateFloorRatio = 1e-4;

double sigmoid(double x);
double log_sigmoid(double x);

/// Full softmax P(context | center) over the whole vocabulary. Only
/// practical for small vocabularies; used to check the sampled objective.
double softmax_probability(const ModelParams& params, WordId center, WordId context,
                           int offset = 1);

/// log s(v'_ctx . v_c) + sum_i log s(-v'_neg_i . v_c), using the v' bank for `offset`.
double word_objective(const ModelParams& params, WordId center, WordId context,
                      std::span<const WordId> negatives, int offset);

/// One ascent step on the word objective term; returns the term before the update.
double word_step(ModelParams& params, double lr, WordId center, WordId context,
                 std::span<const WordId> negatives, int offset);

using PhraseWords = std::span<const WordId>;

/// Phrase counterpart of word_objective: the current phrase is composed from
/// input rows, context and negative phrases from the v'' bank for `offset`.
double phrase_objective(const ModelParams& params, PhraseWords current, PhraseWords context,
                        std::span<const PhraseWords> negatives, int offset,
                        const CompositionConfig& comp);

/// One ascent step on the phrase objective term. Component words of the
/// context and negative phrases move along l_j * phi'(v''_j) * (y - s(f)) * v_p;
/// those of the current phrase along l_j * phi'(v_j) * sum_t (y_t - s(f_t)) v'_t.
/// Returns nullopt without touching anything if a phrase is empty or holds
/// an id outside the vocabulary.
std::optional<double> phrase_step(ModelParams& params, double lr, PhraseWords current,
                                  PhraseWords context, std::span<const PhraseWords> negatives,
                                  int offset, const CompositionConfig& comp);

/// Calls fn(center, context, offset) for every ordered pair of distinct
/// positions at most `window` apart, centers in order, contexts left to right.
template <class Fn>
void for_each_window_pair(std::size_t length, int window, Fn&& fn) {
  const auto n = static_cast<std::ptrdiff_t>(length);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      fn(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<int>(j - i));
    }
  }
}

/// Read-only inputs shared by all workers. Holds a reference to `phrases`.
class TrainingContext {
 public:
  TrainingContext(const TrainConfig& config, const Vocab& vocab, const PhraseVocab& phrases);

  const TrainConfig& config() const noexcept { return config_; }
  const CompositionConfig& composition() const noexcept { return composition_; }
  const PhraseVocab& phrases() const noexcept { return *phrases_; }
  const NoiseDistribution& word_noise() const noexcept { return word_noise_; }
  const NoiseDistribution* phrase_noise() const noexcept {
    return phrase_noise_ ? &*phrase_noise_ : nullptr;
  }
  /// Empty when subsampling is off.
  std::span<const double> keep_probabilities() const noexcept { return keep_prob_; }

 private:
  TrainConfig config_;
  CompositionConfig composition_;
  const PhraseVocab* phrases_;
  NoiseDistribution word_noise_;
  std::optional<NoiseDistribution> phrase_noise_;
  std::vector<double> keep_prob_;
};

struct SentenceResult {
  double word_objective = 0.0;
  double phrase_objective = 0.0;
  std::uint64_t word_pairs = 0;
  std::uint64_t phrase_pairs = 0;
};

/// Word pass over every in-vocabulary word pair within the window, then (in
/// compositional modes with beta > 0) the phrase pass over retained phrases
/// within the same number of chunks, at learning rate lr * beta.
SentenceResult train_sentence(ModelParams& params, const TrainingContext& context,
                              const EncodedSentence& sentence, double lr, WorkerRngs& rngs);

double learning_rate(double lr_start, std::uint64_t tokens_processed, std::uint64_t tokens_planned);

struct TrainReport {
  std::vector<EpochReport> epochs;
};

/// Owns one training run. Not movable: the context refers to members.
class Trainer {
 public:
  Trainer(TrainConfig config, Vocab vocab, PhraseVocab phrases, std::vector<EncodedSentence> corpus);
  /// Continues a run from a checkpoint over the same encoded corpus.
  Trainer(Checkpoint checkpoint, std::vector<EncodedSentence> corpus);

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  bool finished() const noexcept { return state_.epochs_completed >= config_.epochs; }
  EpochReport run_epoch();
  TrainReport run(const std::function<void(const EpochReport&)>& on_epoch = {});

  const TrainConfig& config() const noexcept { return config_; }
  const Vocab& vocab() const noexcept { return vocab_; }
  const PhraseVocab& phrases() const noexcept { return phrases_; }
  const ModelParams& params() const noexcept { return params_; }
  const TrainingState& state() const noexcept { return state_; }
  std::uint64_t corpus_tokens() const noexcept { return corpus_tokens_; }
  double current_learning_rate() const;

  Checkpoint checkpoint() const;

 private:
  std::uint64_t planned_tokens() const;

  TrainConfig config_;
  Vocab vocab_;
  PhraseVocab phrases_;
  std::vector<EncodedSentence> corpus_;
  std::uint64_t corpus_tokens_ = 0;
  ModelParams params_;
  TrainingState state_;
  std::unique_ptr<TrainingContext> context_;
};

/// Vocabularies from `corpus`, encoding, and a full run.
struct TrainResult {
  Vocab vocab;
  PhraseVocab phrases;
  ModelParams params;
  TrainReport report;
};

TrainResult train(std::span<const ChunkedSentence> corpus, const TrainConfig& config);

}  // namespace compskip
