#pragma once

// Word similarity (Spearman), 3CosAdd analogies, and subject-verb phrase
// composition scoring.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compskip/composition.hpp"
#include "compskip/embeddings.hpp"

namespace compskip {

double vector_norm(std::span<const double> v);

/// Clamped to [-1, 1]. Throws std::invalid_argument for a zero vector or a
/// dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson correlation of average ranks. Throws std::invalid_argument for
/// mismatched or too-short inputs and std::domain_error when either list is
/// constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct SimilarityItem {
  std::string a;
  std::string b;
  double score = 0.0;
};
using SimilarityDataset = std::vector<SimilarityItem>;

struct AnalogyQuestion {
  std::string a, b, c, d;
};
struct AnalogySection {
  std::string name;
  std::vector<AnalogyQuestion> questions;
};
struct AnalogyDataset {
  std::vector<AnalogySection> sections;
  std::size_t size() const;
};

struct PhraseItem {
  std::string subject;
  std::string reference;
  std::string landmark;
  double rating = 0.0;
};
using PhraseCompositionDataset = std::vector<PhraseItem>;

/// `word_a<TAB>word_b<TAB>score`; blank lines and `#` comments skipped.
SimilarityDataset load_similarity_dataset(const std::filesystem::path& path, bool lowercase);
/// Google analogy format: `: section` headers, then `a b c d` lines.
AnalogyDataset load_analogy_dataset(const std::filesystem::path& path, bool lowercase);
/// `subject<TAB>reference<TAB>landmark<TAB>rating`.
PhraseCompositionDataset load_phrase_dataset(const std::filesystem::path& path, bool lowercase);

struct CorrelationResult {
  double rho = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;

  double coverage() const;
};

/// Items with an unknown or zero-vector word are dropped. Fewer than two
/// usable items is a DataError.
CorrelationResult word_similarity_eval(const Embeddings& embeddings, const SimilarityDataset& dataset);

/// 3CosAdd over unit-normalised vectors, excluding the three question words.
class AnalogySolver {
 public:
  explicit AnalogySolver(const Embeddings& embeddings);

  /// argmax_i cos(n_b - n_a + n_c, n_i) over i not in {a, b, c}.
  std::optional<std::size_t> solve(std::size_t a, std::size_t b, std::size_t c) const;

 private:
  EmbeddingMatrix unit_;
  std::vector<bool> usable_;
};

struct SectionScore {
  std::string name;
  std::size_t correct = 0;
  std::size_t used = 0;
  std::size_t dropped = 0;

  double accuracy() const;
};

struct AnalogyResult {
  std::vector<SectionScore> sections;
  std::size_t correct = 0;
  std::size_t used = 0;
  std::size_t dropped = 0;

  double accuracy() const;
};

/// Questions with any out-of-vocabulary word are dropped, not counted wrong.
AnalogyResult analogy_eval(const Embeddings& embeddings, const AnalogyDataset& dataset);

/// Cosine between compose(subject, reference) and the landmark's vector,
/// Spearman-correlated with the ratings.
CorrelationResult phrase_similarity_eval(const Embeddings& embeddings, const CompositionConfig& comp,
                                         const PhraseCompositionDataset& dataset);

}  // namespace compskip
