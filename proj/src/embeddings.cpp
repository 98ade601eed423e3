#include "compskip/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "byte_io.hpp"
#include "compskip/error.hpp"
#include "compskip/evaluation.hpp"

namespace compskip {

Embeddings::Embeddings(std::vector<std::string> words, EmbeddingMatrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (words_.size() != vectors_.rows()) throw DataError("embeddings: word count does not match rows");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw DataError("embeddings: duplicate word '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> Embeddings::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EmbeddingFormat> parse_format(std::string_view name) {
  if (name == "text") return EmbeddingFormat::Text;
  if (name == "binary") return EmbeddingFormat::Binary;
  return std::nullopt;
}

Embeddings extract_embeddings(const ModelParams& params, const Vocab& vocab, BankSelector which) {
  if (params.vocab_size() != vocab.size()) throw DataError("export: vocab/model size mismatch");
  const EmbeddingMatrix* m = nullptr;
  switch (which.kind) {
    case BankKind::Input:
      if (which.index == 0) m = &params.input_words;
      break;
    case BankKind::Output:
      if (which.index < params.output_words.size()) m = &params.output_words[which.index];
      break;
    case BankKind::PhraseOutput:
      if (which.index < params.output_phrase_words.size()) m = &params.output_phrase_words[which.index];
      break;
  }
  if (m == nullptr) {
    throw ConfigError("no bank " + std::to_string(which.index) + " of that kind in " +
                      std::string(to_string(params.mode)) + " mode");
  }
  auto words = vocab.words();
  return Embeddings(std::vector<std::string>(words.begin(), words.end()), *m);
}

namespace {

std::string header_line(const Embeddings& e) {
  return std::to_string(e.size()) + " " + std::to_string(e.dim()) + "\n";
}

void append_float(std::string& out, float value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, end);
}

}  // namespace

void write_embeddings(const Embeddings& embeddings, const std::filesystem::path& path,
                      EmbeddingFormat format) {
  std::string out = header_line(embeddings);
  if (format == EmbeddingFormat::Text) {
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      out += embeddings.word(i);
      for (double x : embeddings.vector(i)) {
        out += ' ';
        append_float(out, static_cast<float>(x));
      }
      out += '\n';
    }
  } else {
    detail::ByteWriter w;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      w.put_raw(embeddings.word(i));
      w.put_raw(" ");
      for (double x : embeddings.vector(i)) w.put_f32(static_cast<float>(x));
      w.put_raw("\n");
    }
    out += w.bytes();
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write embeddings to " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file.flush()) throw DataError("write failed for " + path.string());
}

void export_embeddings(const ModelParams& params, const Vocab& vocab,
                       const std::filesystem::path& path, EmbeddingFormat format,
                       BankSelector which) {
  write_embeddings(extract_embeddings(params, vocab, which), path, format);
}

namespace {

std::pair<std::size_t, std::size_t> parse_header(std::string_view line, const std::string& where) {
  std::istringstream hs{std::string(line)};
  std::size_t rows = 0, dim = 0;
  if (!(hs >> rows >> dim) || dim == 0) throw DataError(where + ": malformed header");
  return {rows, dim};
}

Embeddings load_text(std::string_view data, const std::string& where) {
  std::size_t eol = data.find('\n');
  if (eol == std::string_view::npos) throw DataError(where + ": missing header");
  auto [rows, dim] = parse_header(data.substr(0, eol), where);
  std::vector<std::string> words;
  words.reserve(rows);
  EmbeddingMatrix m(rows, dim);
  std::size_t pos = eol + 1;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string line_where = where + ": line " + std::to_string(i + 2);
    if (pos >= data.size()) throw DataError(line_where + ": file ends early");
    const std::size_t line_end = std::min(data.find('\n', pos), data.size());
    std::string_view line = data.substr(pos, line_end - pos);
    std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos || sp == 0) throw DataError(line_where + ": missing word");
    words.emplace_back(line.substr(0, sp));
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    auto row = m.row(i);
    for (std::size_t k = 0; k < dim; ++k) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      float value = 0.0f;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc()) throw DataError(line_where + ": bad value " + std::to_string(k + 1));
      row[k] = value;
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p != end) throw DataError(line_where + ": more than " + std::to_string(dim) + " values");
    pos = line_end + 1;
  }
  return Embeddings(std::move(words), std::move(m));
}

Embeddings load_binary(std::string_view data, const std::string& where) {
  std::size_t eol = data.find('\n');
  if (eol == std::string_view::npos) throw DataError(where + ": missing header");
  auto [rows, dim] = parse_header(data.substr(0, eol), where);
  std::vector<std::string> words;
  words.reserve(rows);
  EmbeddingMatrix m(rows, dim);
  std::size_t pos = eol + 1;
  for (std::size_t i = 0; i < rows; ++i) {
    while (pos < data.size() && data[pos] == '\n') ++pos;
    const std::size_t sp = data.find(' ', pos);
    if (sp == std::string_view::npos || sp == pos) {
      throw DataError(where + ": entry " + std::to_string(i) + " has no word");
    }
    words.emplace_back(data.substr(pos, sp - pos));
    pos = sp + 1;
    if (data.size() - pos < dim * 4) throw DataError(where + ": file ends inside a vector");
    detail::ByteReader r(data.substr(pos, dim * 4), [] {});
    for (double& x : m.row(i)) x = r.get_f32();
    pos += dim * 4;
  }
  return Embeddings(std::move(words), std::move(m));
}

}  // namespace

Embeddings load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings file: " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return format == EmbeddingFormat::Text ? load_text(data, path.string())
                                         : load_binary(data, path.string());
}

std::vector<Neighbor> nearest_neighbors(const Embeddings& embeddings, std::string_view query,
                                        std::size_t k, const CompositionConfig& comp,
                                        bool lowercase) {
  ParseOptions options;
  options.lowercase = lowercase;
  const ChunkedSentence parsed = parse_chunked_line(query, options);

  std::vector<std::size_t> ids;
  std::string missing;
  for (const auto& chunk : parsed.chunks) {
    for (const auto& token : chunk.tokens) {
      if (auto id = embeddings.find(token)) {
        ids.push_back(*id);
      } else {
        missing += missing.empty() ? token : ", " + token;
      }
    }
  }
  if (!missing.empty()) throw DataError("out-of-vocabulary query words: " + missing);
  if (ids.empty()) throw DataError("empty query");

  std::vector<double> q;
  if (ids.size() == 1) {
    auto v = embeddings.vector(ids.front());
    q.assign(v.begin(), v.end());
  } else {
    std::vector<std::span<const double>> rows;
    for (std::size_t id : ids) rows.push_back(embeddings.vector(id));
    q = compose_phrase(rows, comp);
  }
  if (vector_norm(q) == 0.0) throw DataError("query vector is zero");

  std::vector<Neighbor> scored;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (std::find(ids.begin(), ids.end(), i) != ids.end()) continue;
    auto v = embeddings.vector(i);
    if (vector_norm(v) == 0.0) continue;
    order.push_back(i);
    scored.push_back(Neighbor{embeddings.word(i), cosine(q, v)});
  }
  std::vector<std::size_t> rank(scored.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  const std::size_t take = std::min(k, rank.size());
  std::partial_sort(rank.begin(), rank.begin() + static_cast<std::ptrdiff_t>(take), rank.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scored[a].cosine != scored[b].cosine) return scored[a].cosine > scored[b].cosine;
                      return order[a] < order[b];
                    });
  std::vector<Neighbor> result;
  for (std::size_t i = 0; i < take; ++i) result.push_back(scored[rank[i]]);
  return result;
}

}  // namespace compskip
