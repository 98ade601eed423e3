#include "compskip/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "compskip/error.hpp"

namespace compskip {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

bool valid_phrase(PhraseWords words, std::size_t vocab_size) {
  if (words.empty()) return false;
  for (WordId w : words) {
    if (w < 0 || static_cast<std::size_t>(w) >= vocab_size) return false;
  }
  return true;
}

void compose_from(const EmbeddingMatrix& m, PhraseWords words, const CompositionConfig& comp,
                  std::span<double> out) {
  compose_rows_into(
      words.size(), [&](std::size_t i) { return m.row(static_cast<std::size_t>(words[i])); }, comp,
      out);
}

// Per-thread buffers for the step functions.
struct Scratch {
  std::vector<double> grad;
  std::vector<double> current;
  std::vector<double> target;
  std::vector<double> coeff;
  std::vector<double> deltas;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

double softmax_probability(const ModelParams& params, WordId center, WordId context, int offset) {
  const auto& out = params.word_bank(offset);
  auto v = params.input_words.row(static_cast<std::size_t>(center));
  std::vector<double> scores(out.rows());
  double top = -INFINITY;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    scores[i] = dot(out.row(i), v);
    top = std::max(top, scores[i]);
  }
  double denom = 0.0;
  for (double s : scores) denom += std::exp(s - top);
  return std::exp(scores[static_cast<std::size_t>(context)] - top) / denom;
}

double word_objective(const ModelParams& params, WordId center, WordId context,
                      std::span<const WordId> negatives, int offset) {
  const auto& out = params.word_bank(offset);
  auto v = params.input_words.row(static_cast<std::size_t>(center));
  double obj = log_sigmoid(dot(out.row(static_cast<std::size_t>(context)), v));
  for (WordId n : negatives) obj += log_sigmoid(-dot(out.row(static_cast<std::size_t>(n)), v));
  return obj;
}

double word_step(ModelParams& params, double lr, WordId center, WordId context,
                 std::span<const WordId> negatives, int offset) {
  auto& out = params.word_bank(offset);
  auto v = params.input_words.row(static_cast<std::size_t>(center));
  const std::size_t d = v.size();
  auto& s = scratch();
  s.grad.assign(d, 0.0);
  s.coeff.resize(negatives.size() + 1);

  double obj = 0.0;
  for (std::size_t t = 0; t <= negatives.size(); ++t) {
    const bool positive = t == 0;
    const auto id = static_cast<std::size_t>(positive ? context : negatives[t - 1]);
    auto u = out.row(id);
    const double f = dot(u, v);
    obj += positive ? log_sigmoid(f) : log_sigmoid(-f);
    const double g = ((positive ? 1.0 : 0.0) - sigmoid(f)) * lr;
    s.coeff[t] = g;
    for (std::size_t k = 0; k < d; ++k) s.grad[k] += g * u[k];
  }
  for (std::size_t t = 0; t <= negatives.size(); ++t) {
    const auto id = static_cast<std::size_t>(t == 0 ? context : negatives[t - 1]);
    auto u = out.row(id);
    const double g = s.coeff[t];
    for (std::size_t k = 0; k < d; ++k) u[k] += g * v[k];
  }
  for (std::size_t k = 0; k < d; ++k) v[k] += s.grad[k];
  return obj;
}

double phrase_objective(const ModelParams& params, PhraseWords current, PhraseWords context,
                        std::span<const PhraseWords> negatives, int offset,
                        const CompositionConfig& comp) {
  const auto& bank = params.phrase_bank(offset);
  const std::size_t d = params.dim();
  std::vector<double> vp(d), vt(d);
  compose_from(params.input_words, current, comp, vp);
  compose_from(bank, context, comp, vt);
  double obj = log_sigmoid(dot(vt, vp));
  for (PhraseWords neg : negatives) {
    compose_from(bank, neg, comp, vt);
    obj += log_sigmoid(-dot(vt, vp));
  }
  return obj;
}

std::optional<double> phrase_step(ModelParams& params, double lr, PhraseWords current,
                                  PhraseWords context, std::span<const PhraseWords> negatives,
                                  int offset, const CompositionConfig& comp) {
  const std::size_t vocab = params.vocab_size();
  if (!valid_phrase(current, vocab) || !valid_phrase(context, vocab)) return std::nullopt;
  for (PhraseWords neg : negatives) {
    if (!valid_phrase(neg, vocab)) return std::nullopt;
  }

  auto& bank = params.phrase_bank(offset);
  const std::size_t d = params.dim();
  const double alpha = comp.alpha;
  auto& s = scratch();
  s.current.resize(d);
  s.target.resize(d);
  s.grad.assign(d, 0.0);
  s.coeff.resize(negatives.size() + 1);
  compose_from(params.input_words, current, comp, s.current);

  auto target_words = [&](std::size_t t) { return t == 0 ? context : negatives[t - 1]; };

  double obj = 0.0;
  std::size_t output_rows = 0;
  for (std::size_t t = 0; t <= negatives.size(); ++t) {
    const bool positive = t == 0;
    PhraseWords words = target_words(t);
    compose_from(bank, words, comp, s.target);
    const double f = dot(s.target, s.current);
    obj += positive ? log_sigmoid(f) : log_sigmoid(-f);
    const double g = ((positive ? 1.0 : 0.0) - sigmoid(f)) * lr;
    s.coeff[t] = g;
    for (std::size_t k = 0; k < d; ++k) s.grad[k] += g * s.target[k];
    output_rows += words.size();
  }

  // Stage every delta against the entry values, then apply.
  s.deltas.resize((output_rows + current.size()) * d);
  double* delta = s.deltas.data();
  for (std::size_t t = 0; t <= negatives.size(); ++t) {
    PhraseWords words = target_words(t);
    for (std::size_t j = 0; j < words.size(); ++j) {
      const double scale = s.coeff[t] * comp.weight(j, words.size());
      auto u = bank.row(static_cast<std::size_t>(words[j]));
      for (std::size_t k = 0; k < d; ++k) delta[k] = scale * phi_prime(u[k], alpha) * s.current[k];
      delta += d;
    }
  }
  for (std::size_t j = 0; j < current.size(); ++j) {
    const double l = comp.weight(j, current.size());
    auto v = params.input_words.row(static_cast<std::size_t>(current[j]));
    for (std::size_t k = 0; k < d; ++k) delta[k] = l * phi_prime(v[k], alpha) * s.grad[k];
    delta += d;
  }

  delta = s.deltas.data();
  for (std::size_t t = 0; t <= negatives.size(); ++t) {
    for (WordId w : target_words(t)) {
      auto u = bank.row(static_cast<std::size_t>(w));
      for (std::size_t k = 0; k < d; ++k) u[k] += delta[k];
      delta += d;
    }
  }
  for (WordId w : current) {
    auto v = params.input_words.row(static_cast<std::size_t>(w));
    for (std::size_t k = 0; k < d; ++k) v[k] += delta[k];
    delta += d;
  }
  return obj;
}

// ---------------------------------------------------------------------------

TrainingContext::TrainingContext(const TrainConfig& config, const Vocab& vocab,
                                 const PhraseVocab& phrases)
    : config_(config),
      composition_(config.composition()),
      phrases_(&phrases),
      word_noise_(vocab.counts(), config.noise_exponent) {
  if (!phrases.empty()) phrase_noise_.emplace(phrases.counts(), config.noise_exponent);
  if (config.subsample > 0.0) {
    // word2vec's keep probability: (sqrt(f / t) + 1) * t / f, t = sample * total.
    const double threshold = config.subsample * static_cast<double>(vocab.total());
    keep_prob_.resize(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      const double f = static_cast<double>(vocab.counts()[i]);
      keep_prob_[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
    }
  }
}

SentenceResult train_sentence(ModelParams& params, const TrainingContext& context,
                              const EncodedSentence& sentence, double lr, WorkerRngs& rngs) {
  const TrainConfig& config = context.config();
  SentenceResult result;

  thread_local std::vector<WordId> words;
  thread_local std::vector<WordId> negatives;
  words.clear();
  auto keep = context.keep_probabilities();
  for (WordId w : sentence.words) {
    if (!keep.empty() && keep[static_cast<std::size_t>(w)] < uniform01(rngs.words)) continue;
    words.push_back(w);
  }

  const bool exclude_words = context.word_noise().size() > 1;
  for_each_window_pair(words.size(), config.window, [&](std::size_t i, std::size_t j, int offset) {
    negatives.clear();
    std::optional<std::int32_t> exclude;
    if (exclude_words) exclude = words[j];
    sample_negatives_into(context.word_noise(), rngs.words, config.word_negatives, exclude, negatives);
    result.word_objective += word_step(params, lr, words[i], words[j], negatives, offset);
    ++result.word_pairs;
  });

  const NoiseDistribution* phrase_noise = context.phrase_noise();
  if (!uses_phrases(config.mode) || !(config.beta > 0.0) || phrase_noise == nullptr) return result;

  const PhraseVocab& phrases = context.phrases();
  const double phrase_lr = lr * config.beta;
  const bool exclude_phrases = phrase_noise->size() > 1;
  thread_local std::vector<PhraseWords> negative_phrases;
  for_each_window_pair(
      sentence.phrases.size(), config.window, [&](std::size_t i, std::size_t j, int offset) {
        const PhraseId current = sentence.phrases[i];
        negatives.clear();
        std::optional<std::int32_t> exclude;
        if (exclude_phrases) exclude = current;
        sample_negatives_into(*phrase_noise, rngs.phrases, config.phrase_negatives, exclude,
                              negatives);
        negative_phrases.clear();
        for (PhraseId n : negatives) negative_phrases.push_back(phrases.words(n));
        auto obj = phrase_step(params, phrase_lr, phrases.words(current),
                               phrases.words(sentence.phrases[j]), negative_phrases, offset,
                               context.composition());
        if (obj) {
          result.phrase_objective += *obj;
          ++result.phrase_pairs;
        }
      });
  return result;
}

double learning_rate(double lr_start, std::uint64_t tokens_processed, std::uint64_t tokens_planned) {
  const double progress =
      static_cast<double>(tokens_processed) / (static_cast<double>(tokens_planned) + 1.0);
  return lr_start * std::max(1.0 - progress, kLearningRateFloorRatio);
}

// ---------------------------------------------------------------------------

double EpochReport::mean_word_objective() const {
  return word_pairs == 0 ? 0.0 : word_objective_sum / static_cast<double>(word_pairs);
}

double EpochReport::mean_phrase_objective() const {
  return phrase_pairs == 0 ? 0.0 : phrase_objective_sum / static_cast<double>(phrase_pairs);
}

double EpochReport::tokens_per_second() const {
  return seconds > 0.0 ? static_cast<double>(tokens) / seconds : 0.0;
}

std::string format_epoch_line(const EpochReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch %d E_w=%.6f E_p=%.6f tokens/s=%.1f", report.epoch,
                report.mean_word_objective(), report.mean_phrase_objective(),
                report.tokens_per_second());
  return buf;
}

namespace {

std::uint64_t count_tokens(const std::vector<EncodedSentence>& corpus) {
  std::uint64_t n = 0;
  for (const auto& s : corpus) n += s.words.size();
  return n;
}

std::vector<WorkerRngs> seed_workers(std::uint64_t seed, int workers) {
  std::vector<WorkerRngs> rngs;
  for (int w = 0; w < workers; ++w) {
    const auto base = static_cast<std::uint64_t>(w) * 2;
    rngs.push_back(WorkerRngs{Rng(derive_seed(seed, base + 1)), Rng(derive_seed(seed, base + 2))});
  }
  return rngs;
}

}  // namespace

Trainer::Trainer(TrainConfig config, Vocab vocab, PhraseVocab phrases,
                 std::vector<EncodedSentence> corpus)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      phrases_(std::move(phrases)),
      corpus_(std::move(corpus)),
      corpus_tokens_(count_tokens(corpus_)) {
  config_.validate();
  Rng init_rng(derive_seed(config_.seed, 0));
  params_ = init_params(vocab_.size(), config_, init_rng);
  state_.rngs = seed_workers(config_.seed, config_.workers);
  context_ = std::make_unique<TrainingContext>(config_, vocab_, phrases_);
}

Trainer::Trainer(Checkpoint checkpoint, std::vector<EncodedSentence> corpus)
    : config_(std::move(checkpoint.config)),
      vocab_(std::move(checkpoint.vocab)),
      phrases_(std::move(checkpoint.phrases)),
      corpus_(std::move(corpus)),
      corpus_tokens_(count_tokens(corpus_)),
      params_(std::move(checkpoint.params)),
      state_(std::move(checkpoint.state)) {
  config_.validate();
  params_.validate();
  if (params_.vocab_size() != vocab_.size()) throw DataError("checkpoint: vocab/model size mismatch");
  if (state_.rngs.size() != static_cast<std::size_t>(config_.workers)) {
    throw DataError("checkpoint: worker RNG count does not match config");
  }
  context_ = std::make_unique<TrainingContext>(config_, vocab_, phrases_);
}

std::uint64_t Trainer::planned_tokens() const {
  return corpus_tokens_ * static_cast<std::uint64_t>(config_.epochs);
}

double Trainer::current_learning_rate() const {
  return learning_rate(config_.lr_start, state_.tokens_processed, planned_tokens());
}

EpochReport Trainer::run_epoch() {
  EpochReport report;
  report.epoch = state_.epochs_completed;
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t planned = planned_tokens();
  const std::size_t workers = state_.rngs.size();

  std::atomic<std::uint64_t> processed{state_.tokens_processed};
  std::vector<SentenceResult> totals(workers);

  auto shard = [&](std::size_t w) {
    const std::size_t begin = corpus_.size() * w / workers;
    const std::size_t end = corpus_.size() * (w + 1) / workers;
    SentenceResult& acc = totals[w];
    for (std::size_t i = begin; i < end; ++i) {
      const EncodedSentence& sentence = corpus_[i];
      const double lr = learning_rate(config_.lr_start, processed.load(std::memory_order_relaxed), planned);
      SentenceResult r = train_sentence(params_, *context_, sentence, lr, state_.rngs[w]);
      processed.fetch_add(sentence.words.size(), std::memory_order_relaxed);
      acc.word_objective += r.word_objective;
      acc.phrase_objective += r.phrase_objective;
      acc.word_pairs += r.word_pairs;
      acc.phrase_pairs += r.phrase_pairs;
    }
  };

  if (workers == 1) {
    shard(0);
  } else {
    // Hogwild: workers write shared rows without synchronisation.
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(shard, w);
    for (auto& t : threads) t.join();
  }

  for (const auto& r : totals) {
    report.word_objective_sum += r.word_objective;
    report.phrase_objective_sum += r.phrase_objective;
    report.word_pairs += r.word_pairs;
    report.phrase_pairs += r.phrase_pairs;
  }
  report.tokens = processed.load() - state_.tokens_processed;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!params_.all_finite()) {
    throw std::runtime_error("non-finite parameters after epoch " + std::to_string(report.epoch));
  }
  state_.tokens_processed = processed.load();
  ++state_.epochs_completed;
  state_.history.push_back(report);
  return report;
}

TrainReport Trainer::run(const std::function<void(const EpochReport&)>& on_epoch) {
  TrainReport report;
  while (!finished()) {
    report.epochs.push_back(run_epoch());
    if (on_epoch) on_epoch(report.epochs.back());
  }
  return report;
}

Checkpoint Trainer::checkpoint() const {
  return Checkpoint{config_, vocab_, phrases_, params_, state_};
}

TrainResult train(std::span<const ChunkedSentence> corpus, const TrainConfig& config) {
  config.validate();
  Vocab vocab = build_vocab(corpus, config.min_count);
  if (vocab.empty()) throw DataError("no word reaches min-count; vocabulary is empty");
  PhraseVocab phrases;
  if (uses_phrases(config.mode)) {
    phrases = build_phrase_vocab(corpus, vocab, config.phrase_min_count, config.include_singletons);
  }
  std::vector<EncodedSentence> encoded;
  encoded.reserve(corpus.size());
  for (const auto& s : corpus) encoded.push_back(encode_sentence(s, vocab, phrases));

  Trainer trainer(config, vocab, phrases, std::move(encoded));
  TrainReport report = trainer.run();
  return TrainResult{std::move(vocab), std::move(phrases), trainer.params(), std::move(report)};
}

}  // namespace compskip
