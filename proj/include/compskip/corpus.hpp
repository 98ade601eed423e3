#pragma once

// Chunk-annotated corpus parsing and word/phrase vocabularies.
//
// Line format: `[NP the cat] sat [PP on [...]` is not allowed (no nesting);
// a sentence is a sequence of bracket groups `[LABEL tok ...]` and bare
// tokens. Bare tokens become single-token chunks labelled "O".

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace compskip {

using WordId = std::int32_t;
using PhraseId = std::int32_t;

inline constexpr std::string_view kOutsideLabel = "O";

struct Chunk {
  std::string label;
  std::vector<std::string> tokens;

  bool operator==(const Chunk&) const = default;
};

struct ChunkedSentence {
  std::vector<Chunk> chunks;

  std::size_t token_count() const;
  bool operator==(const ChunkedSentence&) const = default;
};

struct ParseOptions {
  bool lowercase = false;
  // Ignore brackets; every whitespace-separated token is an O chunk.
  bool plain_text = false;
};

/// Throws ParseError on unbalanced brackets, nested groups or empty groups.
ChunkedSentence parse_chunked_line(std::string_view line, const ParseOptions& options = {});

/// Inverse of parse_chunked_line. Single-token O chunks are written bare.
std::string to_bracket_string(const ChunkedSentence& sentence);

/// Streams a corpus file one sentence per line. Parse failures are rethrown
/// as DataError carrying `path:line`.
void for_each_sentence(const std::filesystem::path& path, const ParseOptions& options,
                       const std::function<void(ChunkedSentence&&)>& fn);

std::vector<ChunkedSentence> read_corpus(const std::filesystem::path& path,
                                         const ParseOptions& options);

class Vocab {
 public:
  Vocab() = default;

  /// Ids are assigned in the order given. Counts must be positive.
  static Vocab from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  std::optional<WordId> find(const std::string& word) const;
  const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::uint64_t count(WordId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::span<const std::string> words() const noexcept { return words_; }
  std::uint64_t total() const noexcept { return total_; }

  /// Header `W total_tokens`, then `word<TAB>count` per line in id order.
  void dump(std::ostream& out) const;
  static Vocab load(std::istream& in);

  bool operator==(const Vocab& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
  std::uint64_t total_ = 0;
};

/// Counts words incrementally so corpora can be streamed.
class VocabBuilder {
 public:
  void add(const ChunkedSentence& sentence);
  /// Keeps words with count >= min_count; ids by descending count, ties by
  /// first occurrence.
  Vocab build(std::uint64_t min_count) const;

 private:
  std::unordered_map<std::string, std::size_t> seen_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
};

Vocab build_vocab(std::span<const ChunkedSentence> corpus, std::uint64_t min_count);

struct PhraseKey {
  std::string label;
  std::vector<WordId> words;

  bool operator==(const PhraseKey&) const = default;
};

struct PhraseKeyHash {
  std::size_t operator()(const PhraseKey& key) const noexcept;
};

class PhraseVocab {
 public:
  PhraseVocab() = default;

  static PhraseVocab from_entries(std::vector<std::pair<PhraseKey, std::uint64_t>> entries);

  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }
  std::optional<PhraseId> find(const PhraseKey& key) const;
  const PhraseKey& key(PhraseId id) const { return keys_.at(static_cast<std::size_t>(id)); }
  std::span<const WordId> words(PhraseId id) const { return key(id).words; }
  std::uint64_t count(PhraseId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }

  bool operator==(const PhraseVocab& other) const {
    return keys_ == other.keys_ && counts_ == other.counts_;
  }

 private:
  std::vector<PhraseKey> keys_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<PhraseKey, PhraseId, PhraseKeyHash> index_;
  std::uint64_t total_ = 0;
};

/// Phrase key of a chunk, or nullopt when any token is out of vocabulary.
std::optional<PhraseKey> phrase_key(const Chunk& chunk, const Vocab& vocab);

class PhraseVocabBuilder {
 public:
  PhraseVocabBuilder(const Vocab& vocab, bool include_singletons)
      : vocab_(&vocab), include_singletons_(include_singletons) {}

  void add(const ChunkedSentence& sentence);
  PhraseVocab build(std::uint64_t phrase_min_count) const;

 private:
  const Vocab* vocab_;
  bool include_singletons_;
  std::unordered_map<PhraseKey, std::size_t, PhraseKeyHash> seen_;
  std::vector<PhraseKey> keys_;
  std::vector<std::uint64_t> counts_;
};

PhraseVocab build_phrase_vocab(std::span<const ChunkedSentence> corpus, const Vocab& vocab,
                               std::uint64_t phrase_min_count, bool include_singletons);

/// A sentence mapped to ids: in-vocabulary words in surface order and
/// retained phrases in chunk order. Everything else is dropped.
struct EncodedSentence {
  std::vector<WordId> words;
  std::vector<PhraseId> phrases;

  bool operator==(const EncodedSentence&) const = default;
};

EncodedSentence encode_sentence(const ChunkedSentence& sentence, const Vocab& vocab,
                                const PhraseVocab& phrases);

}  // namespace compskip
