#include "compskip/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <system_error>

#include "byte_io.hpp"
#include "compskip/error.hpp"

namespace compskip {

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

const std::string* lookup(const ManifestEntries& entries, std::string_view key) {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string& require(const ManifestEntries& entries, std::string_view key) {
  const std::string* v = lookup(entries, key);
  if (v == nullptr) throw DataError("manifest: missing key " + std::string(key));
  return *v;
}

template <class T>
T number(const ManifestEntries& entries, std::string_view key) {
  const std::string& text = require(entries, key);
  std::istringstream is(text);
  T value{};
  if (!(is >> value) || !is.eof()) throw DataError("manifest: bad value for " + std::string(key));
  return value;
}

bool boolean(const ManifestEntries& entries, std::string_view key) {
  const std::string& text = require(entries, key);
  if (text == "true") return true;
  if (text == "false") return false;
  throw DataError("manifest: bad boolean for " + std::string(key));
}

struct DigestCtx {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  DigestCtx() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256: cannot initialise digest");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 15];
    }
    return out;
  }
};

}  // namespace

ManifestEntries config_entries(const TrainConfig& c) {
  return {
      {"dim", std::to_string(c.dim)},
      {"window", std::to_string(c.window)},
      {"word_negatives", std::to_string(c.word_negatives)},
      {"phrase_negatives", std::to_string(c.phrase_negatives)},
      {"beta", exact(c.beta)},
      {"alpha", exact(c.alpha)},
      {"mode", std::string(to_string(c.mode))},
      {"min_count", std::to_string(c.min_count)},
      {"phrase_min_count", std::to_string(c.phrase_min_count)},
      {"include_singletons", flag(c.include_singletons)},
      {"lowercase", flag(c.lowercase)},
      {"plain_text", flag(c.plain_text)},
      {"lr", exact(c.lr_start)},
      {"epochs", std::to_string(c.epochs)},
      {"seed", std::to_string(c.seed)},
      {"workers", std::to_string(c.workers)},
      {"subsample", exact(c.subsample)},
      {"noise_exponent", exact(c.noise_exponent)},
  };
}

TrainConfig config_from_entries(const ManifestEntries& e) {
  TrainConfig c;
  c.dim = number<std::size_t>(e, "dim");
  c.window = number<int>(e, "window");
  c.word_negatives = number<std::size_t>(e, "word_negatives");
  c.phrase_negatives = number<std::size_t>(e, "phrase_negatives");
  c.beta = number<double>(e, "beta");
  c.alpha = number<double>(e, "alpha");
  auto mode = parse_mode(require(e, "mode"));
  if (!mode) throw DataError("manifest: unknown mode " + require(e, "mode"));
  c.mode = *mode;
  c.min_count = number<std::uint64_t>(e, "min_count");
  c.phrase_min_count = number<std::uint64_t>(e, "phrase_min_count");
  c.include_singletons = boolean(e, "include_singletons");
  c.lowercase = boolean(e, "lowercase");
  c.plain_text = boolean(e, "plain_text");
  c.lr_start = number<double>(e, "lr");
  c.epochs = number<int>(e, "epochs");
  c.seed = number<std::uint64_t>(e, "seed");
  c.workers = number<int>(e, "workers");
  c.subsample = number<double>(e, "subsample");
  c.noise_exponent = number<double>(e, "noise_exponent");
  return c;
}

bool is_wall_clock_key(std::string_view key) {
  return key == "wall_clock_seconds" || key.ends_with(".seconds") || key.ends_with(".tokens_per_sec");
}

ManifestEntries manifest_entries(const RunManifest& m) {
  ManifestEntries out = config_entries(m.config);
  out.emplace_back("corpus_path", m.corpus_path);
  out.emplace_back("corpus_sha256", m.corpus_digest);
  out.emplace_back("vocab_size", std::to_string(m.vocab_size));
  out.emplace_back("phrase_vocab_size", std::to_string(m.phrase_vocab_size));
  out.emplace_back("corpus_tokens", std::to_string(m.corpus_tokens));
  if (!m.resumed_from.empty()) out.emplace_back("resumed_from", m.resumed_from);
  out.emplace_back("epochs_run", std::to_string(m.epochs.size()));
  for (const auto& e : m.epochs) {
    const std::string p = "epoch." + std::to_string(e.epoch) + ".";
    out.emplace_back(p + "E_w", exact(e.mean_word_objective()));
    out.emplace_back(p + "E_p", exact(e.mean_phrase_objective()));
    out.emplace_back(p + "word_pairs", std::to_string(e.word_pairs));
    out.emplace_back(p + "phrase_pairs", std::to_string(e.phrase_pairs));
    out.emplace_back(p + "tokens", std::to_string(e.tokens));
    out.emplace_back(p + "seconds", exact(e.seconds));
    out.emplace_back(p + "tokens_per_sec", exact(e.tokens_per_second()));
  }
  out.emplace_back("params_sha256", m.params_digest);
  out.emplace_back("wall_clock_seconds", exact(m.wall_clock_seconds));
  return out;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::string text;
  for (const auto& [k, v] : manifest_entries(manifest)) text += k + "=" + v + "\n";
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write manifest " + tmp.string());
    out << text;
    if (!out.flush()) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move manifest into place: " + ec.message());
}

ManifestEntries read_manifest_entries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  ManifestEntries entries;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(no) + ": expected key=value");
    }
    entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return entries;
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const ManifestEntries e = read_manifest_entries(path);
  RunManifest m;
  m.config = config_from_entries(e);
  m.corpus_path = require(e, "corpus_path");
  m.corpus_digest = require(e, "corpus_sha256");
  m.vocab_size = number<std::size_t>(e, "vocab_size");
  m.phrase_vocab_size = number<std::size_t>(e, "phrase_vocab_size");
  m.corpus_tokens = number<std::uint64_t>(e, "corpus_tokens");
  if (const std::string* r = lookup(e, "resumed_from")) m.resumed_from = *r;
  const auto runs = number<std::size_t>(e, "epochs_run");
  // Epoch indices need not start at 0 for resumed runs; collect in file order.
  for (const auto& [k, v] : e) {
    if (!k.starts_with("epoch.") || !k.ends_with(".word_pairs")) continue;
    const std::string p = k.substr(0, k.size() - std::string_view("word_pairs").size());
    EpochReport r;
    r.epoch = std::stoi(p.substr(6));
    r.word_pairs = number<std::uint64_t>(e, p + "word_pairs");
    r.phrase_pairs = number<std::uint64_t>(e, p + "phrase_pairs");
    r.word_objective_sum = number<double>(e, p + "E_w") * static_cast<double>(r.word_pairs);
    r.phrase_objective_sum = number<double>(e, p + "E_p") * static_cast<double>(r.phrase_pairs);
    r.tokens = number<std::uint64_t>(e, p + "tokens");
    r.seconds = number<double>(e, p + "seconds");
    m.epochs.push_back(r);
  }
  if (m.epochs.size() != runs) throw DataError("manifest: epochs_run does not match epoch entries");
  m.params_digest = require(e, "params_sha256");
  m.wall_clock_seconds = number<double>(e, "wall_clock_seconds");
  return m;
}

std::string sha256_hex(std::string_view bytes) {
  DigestCtx d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  DigestCtx d;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw DataError("read error on " + path.string());
  return d.hex();
}

std::string params_digest(const ModelParams& params) {
  DigestCtx d;
  auto feed = [&](const EmbeddingMatrix& m) {
    detail::ByteWriter w;
    w.put_u64(m.rows());
    w.put_u64(m.dim());
    for (double x : m.values()) w.put_f64(x);
    d.update(w.bytes().data(), w.bytes().size());
  };
  feed(params.input_words);
  for (const auto& m : params.output_words) feed(m);
  for (const auto& m : params.output_phrase_words) feed(m);
  return d.hex();
}

}  // namespace compskip
