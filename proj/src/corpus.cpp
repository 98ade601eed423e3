#include "compskip/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "compskip/error.hpp"

namespace compskip {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_bracket(char c) { return c == '[' || c == ']'; }

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string make_token(std::string_view raw, bool lowercase) {
  return lowercase ? lowered(raw) : std::string(raw);
}

Chunk outside_chunk(std::string token) {
  Chunk chunk;
  chunk.label = std::string(kOutsideLabel);
  chunk.tokens.push_back(std::move(token));
  return chunk;
}

}  // namespace

std::size_t ChunkedSentence::token_count() const {
  std::size_t n = 0;
  for (const auto& chunk : chunks) n += chunk.tokens.size();
  return n;
}

ChunkedSentence parse_chunked_line(std::string_view line, const ParseOptions& options) {
  ChunkedSentence sentence;
  const std::size_t n = line.size();
  std::size_t i = 0;

  if (options.plain_text) {
    while (i < n) {
      while (i < n && is_space(line[i])) ++i;
      std::size_t start = i;
      while (i < n && !is_space(line[i])) ++i;
      if (i > start) {
        sentence.chunks.push_back(
            outside_chunk(make_token(line.substr(start, i - start), options.lowercase)));
      }
    }
    return sentence;
  }

  auto read_word = [&](std::size_t& pos) {
    std::size_t start = pos;
    while (pos < n && !is_space(line[pos]) && !is_bracket(line[pos])) ++pos;
    return line.substr(start, pos - start);
  };

  bool in_group = false;
  std::size_t group_start = 0;
  Chunk group;

  while (i < n) {
    char c = line[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '[') {
      if (in_group) throw ParseError("nested '[' inside bracket group", i);
      in_group = true;
      group_start = i;
      ++i;
      while (i < n && is_space(line[i])) ++i;
      std::string_view label = read_word(i);
      if (label.empty()) throw ParseError("empty bracket group", group_start);
      group = Chunk{std::string(label), {}};
    } else if (c == ']') {
      if (!in_group) throw ParseError("unmatched ']'", i);
      if (group.tokens.empty()) throw ParseError("empty bracket group", group_start);
      sentence.chunks.push_back(std::move(group));
      group = Chunk{};
      in_group = false;
      ++i;
    } else {
      std::string token = make_token(read_word(i), options.lowercase);
      if (in_group) {
        group.tokens.push_back(std::move(token));
      } else {
        sentence.chunks.push_back(outside_chunk(std::move(token)));
      }
    }
  }
  if (in_group) throw ParseError("unclosed '['", group_start);
  return sentence;
}

std::string to_bracket_string(const ChunkedSentence& sentence) {
  std::string out;
  for (const auto& chunk : sentence.chunks) {
    if (!out.empty()) out += ' ';
    if (chunk.label == kOutsideLabel && chunk.tokens.size() == 1) {
      out += chunk.tokens.front();
      continue;
    }
    out += '[';
    out += chunk.label;
    for (const auto& token : chunk.tokens) {
      out += ' ';
      out += token;
    }
    out += ']';
  }
  return out;
}

void for_each_sentence(const std::filesystem::path& path, const ParseOptions& options,
                       const std::function<void(ChunkedSentence&&)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ChunkedSentence sentence;
    try {
      sentence = parse_chunked_line(line, options);
    } catch (const ParseError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    fn(std::move(sentence));
  }
  if (in.bad()) throw DataError("read error in corpus file: " + path.string());
}

std::vector<ChunkedSentence> read_corpus(const std::filesystem::path& path,
                                         const ParseOptions& options) {
  std::vector<ChunkedSentence> corpus;
  for_each_sentence(path, options, [&](ChunkedSentence&& s) { corpus.push_back(std::move(s)); });
  return corpus;
}

// ---------------------------------------------------------------------------
// Vocab

Vocab Vocab::from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries) {
  Vocab vocab;
  vocab.words_.reserve(entries.size());
  vocab.counts_.reserve(entries.size());
  for (auto& [word, count] : entries) {
    if (count == 0) throw DataError("vocabulary entry with zero count: " + word);
    auto id = static_cast<WordId>(vocab.words_.size());
    if (!vocab.index_.emplace(word, id).second) {
      throw DataError("duplicate vocabulary entry: " + word);
    }
    vocab.words_.push_back(std::move(word));
    vocab.counts_.push_back(count);
    vocab.total_ += count;
  }
  return vocab;
}

std::optional<WordId> Vocab::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocab::dump(std::ostream& out) const {
  out << size() << ' ' << total_ << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << counts_[i] << '\n';
  }
}

Vocab Vocab::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("vocab dump: missing header");
  std::istringstream hs(header);
  std::size_t size = 0;
  std::uint64_t total = 0;
  if (!(hs >> size >> total)) throw DataError("vocab dump: malformed header");

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(size);
  std::string line;
  while (entries.size() < size && std::getline(in, line)) {
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError("vocab dump: missing tab in: " + line);
    std::uint64_t count = 0;
    try {
      count = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError("vocab dump: bad count in: " + line);
    }
    entries.emplace_back(line.substr(0, tab), count);
  }
  if (entries.size() != size) throw DataError("vocab dump: fewer entries than header");
  Vocab vocab = from_entries(std::move(entries));
  if (vocab.total() != total) throw DataError("vocab dump: total does not match counts");
  return vocab;
}

void VocabBuilder::add(const ChunkedSentence& sentence) {
  for (const auto& chunk : sentence.chunks) {
    for (const auto& token : chunk.tokens) {
      auto [it, inserted] = seen_.try_emplace(token, words_.size());
      if (inserted) {
        words_.push_back(token);
        counts_.push_back(0);
      }
      ++counts_[it->second];
    }
  }
}

namespace {

// Indices of kept entries, by descending count and then first occurrence
// (entries are stored in first-occurrence order, so a stable sort suffices).
std::vector<std::size_t> ranked_survivors(std::span<const std::uint64_t> counts,
                                          std::uint64_t min_count) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] >= min_count) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  return order;
}

}  // namespace

Vocab VocabBuilder::build(std::uint64_t min_count) const {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (std::size_t i : ranked_survivors(counts_, min_count)) {
    entries.emplace_back(words_[i], counts_[i]);
  }
  return Vocab::from_entries(std::move(entries));
}

Vocab build_vocab(std::span<const ChunkedSentence> corpus, std::uint64_t min_count) {
  VocabBuilder builder;
  for (const auto& sentence : corpus) builder.add(sentence);
  return builder.build(min_count);
}

// ---------------------------------------------------------------------------
// Phrases

std::size_t PhraseKeyHash::operator()(const PhraseKey& key) const noexcept {
  std::size_t h = std::hash<std::string>{}(key.label);
  for (WordId w : key.words) {
    h ^= std::hash<WordId>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

PhraseVocab PhraseVocab::from_entries(std::vector<std::pair<PhraseKey, std::uint64_t>> entries) {
  PhraseVocab vocab;
  for (auto& [key, count] : entries) {
    if (count == 0) throw DataError("phrase vocabulary entry with zero count");
    if (key.words.empty()) throw DataError("phrase vocabulary entry with no words");
    auto id = static_cast<PhraseId>(vocab.keys_.size());
    if (!vocab.index_.emplace(key, id).second) {
      throw DataError("duplicate phrase vocabulary entry");
    }
    vocab.keys_.push_back(std::move(key));
    vocab.counts_.push_back(count);
    vocab.total_ += count;
  }
  return vocab;
}

std::optional<PhraseId> PhraseVocab::find(const PhraseKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<PhraseKey> phrase_key(const Chunk& chunk, const Vocab& vocab) {
  PhraseKey key{chunk.label, {}};
  key.words.reserve(chunk.tokens.size());
  for (const auto& token : chunk.tokens) {
    auto id = vocab.find(token);
    if (!id) return std::nullopt;
    key.words.push_back(*id);
  }
  return key;
}

void PhraseVocabBuilder::add(const ChunkedSentence& sentence) {
  for (const auto& chunk : sentence.chunks) {
    if (chunk.tokens.size() == 1 && !include_singletons_) continue;
    auto key = phrase_key(chunk, *vocab_);
    if (!key) continue;
    auto [it, inserted] = seen_.try_emplace(*key, keys_.size());
    if (inserted) {
      keys_.push_back(std::move(*key));
      counts_.push_back(0);
    }
    ++counts_[it->second];
  }
}

PhraseVocab PhraseVocabBuilder::build(std::uint64_t phrase_min_count) const {
  if (phrase_min_count < 1) throw ConfigError("phrase_min_count must be >= 1");
  std::vector<std::pair<PhraseKey, std::uint64_t>> entries;
  for (std::size_t i : ranked_survivors(counts_, phrase_min_count)) {
    entries.emplace_back(keys_[i], counts_[i]);
  }
  return PhraseVocab::from_entries(std::move(entries));
}

PhraseVocab build_phrase_vocab(std::span<const ChunkedSentence> corpus, const Vocab& vocab,
                               std::uint64_t phrase_min_count, bool include_singletons) {
  PhraseVocabBuilder builder(vocab, include_singletons);
  for (const auto& sentence : corpus) builder.add(sentence);
  return builder.build(phrase_min_count);
}

EncodedSentence encode_sentence(const ChunkedSentence& sentence, const Vocab& vocab,
                                const PhraseVocab& phrases) {
  EncodedSentence encoded;
  for (const auto& chunk : sentence.chunks) {
    bool all_known = true;
    for (const auto& token : chunk.tokens) {
      if (auto id = vocab.find(token)) {
        encoded.words.push_back(*id);
      } else {
        all_known = false;
      }
    }
    if (!all_known || phrases.empty()) continue;
    if (auto key = phrase_key(chunk, vocab)) {
      if (auto pid = phrases.find(*key)) encoded.phrases.push_back(*pid);
    }
  }
  return encoded;
}

}  // namespace compskip
