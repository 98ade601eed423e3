#pragma once

// Word vectors as a standalone table, word2vec text/binary interchange, and
// nearest-neighbour lookup.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "compskip/composition.hpp"
#include "compskip/corpus.hpp"
#include "compskip/model.hpp"

namespace compskip {

class Embeddings {
 public:
  Embeddings() = default;
  /// Throws DataError on a size mismatch or a duplicated word.
  Embeddings(std::vector<std::string> words, EmbeddingMatrix vectors);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return vectors_.dim(); }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::span<const std::string> words() const noexcept { return words_; }
  std::optional<std::size_t> find(const std::string& word) const;
  std::span<const double> vector(std::size_t i) const { return vectors_.row(i); }
  const EmbeddingMatrix& matrix() const noexcept { return vectors_; }

 private:
  std::vector<std::string> words_;
  EmbeddingMatrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class EmbeddingFormat { Text, Binary };
std::optional<EmbeddingFormat> parse_format(std::string_view name);

enum class BankKind { Input, Output, PhraseOutput };

struct BankSelector {
  BankKind kind = BankKind::Input;
  std::size_t index = 0;
};

/// Copies one matrix out of the model. Throws ConfigError for a bank that
/// does not exist in this mode.
Embeddings extract_embeddings(const ModelParams& params, const Vocab& vocab, BankSelector which);

/// Text: `W d` header, then `word v_1 ... v_d` per line. Binary: the same
/// header line, then per word `word`, a space, d little-endian float32 values
/// and a newline (the word2vec -binary 1 layout). Values are rounded to float32.
void write_embeddings(const Embeddings& embeddings, const std::filesystem::path& path,
                      EmbeddingFormat format);

void export_embeddings(const ModelParams& params, const Vocab& vocab,
                       const std::filesystem::path& path, EmbeddingFormat format,
                       BankSelector which = {});

Embeddings load_embeddings(const std::filesystem::path& path, EmbeddingFormat format);

struct Neighbor {
  std::string word;
  double cosine = 0.0;
};

/// Top-k words by cosine to `query`, excluding the query's own words. A query
/// with several tokens (e.g. `[NP red car]`) is composed with `comp`. Throws
/// DataError naming every out-of-vocabulary query word.
std::vector<Neighbor> nearest_neighbors(const Embeddings& embeddings, std::string_view query,
                                        std::size_t k, const CompositionConfig& comp,
                                        bool lowercase = false);

}  // namespace compskip
