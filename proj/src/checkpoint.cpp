#include "compskip/checkpoint.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "byte_io.hpp"

namespace compskip {

namespace {

using detail::ByteWriter;

constexpr std::string_view kMagic = "CSGCKPT1";
constexpr std::size_t kHeaderSize = 8 + 4 + 8;
constexpr std::size_t kTrailerSize = 4;

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  constexpr std::size_t kPiece = 1u << 30;
  for (std::size_t pos = 0; pos < bytes.size(); pos += kPiece) {
    const std::size_t n = std::min(kPiece, bytes.size() - pos);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void fail(CheckpointError::Kind kind, const std::string& what) {
  throw CheckpointError(kind, "checkpoint: " + what);
}

void put_config(ByteWriter& w, const TrainConfig& c) {
  w.put_u64(c.dim);
  w.put_i32(c.window);
  w.put_u64(c.word_negatives);
  w.put_u64(c.phrase_negatives);
  w.put_f64(c.beta);
  w.put_f64(c.alpha);
  w.put_u8(static_cast<std::uint8_t>(c.mode));
  w.put_u64(c.min_count);
  w.put_u64(c.phrase_min_count);
  w.put_u8(c.include_singletons);
  w.put_u8(c.lowercase);
  w.put_u8(c.plain_text);
  w.put_f64(c.lr_start);
  w.put_i32(c.epochs);
  w.put_u64(c.seed);
  w.put_i32(c.workers);
  w.put_f64(c.subsample);
  w.put_f64(c.noise_exponent);
}

Mode mode_from_byte(std::uint8_t b) {
  if (b > static_cast<std::uint8_t>(Mode::CompositionalPositional)) {
    fail(CheckpointError::Kind::Malformed, "unknown mode " + std::to_string(b));
  }
  return static_cast<Mode>(b);
}

template <class Reader>
TrainConfig get_config(Reader& r) {
  TrainConfig c;
  c.dim = r.get_u64();
  c.window = r.get_i32();
  c.word_negatives = r.get_u64();
  c.phrase_negatives = r.get_u64();
  c.beta = r.get_f64();
  c.alpha = r.get_f64();
  c.mode = mode_from_byte(r.get_u8());
  c.min_count = r.get_u64();
  c.phrase_min_count = r.get_u64();
  c.include_singletons = r.get_u8() != 0;
  c.lowercase = r.get_u8() != 0;
  c.plain_text = r.get_u8() != 0;
  c.lr_start = r.get_f64();
  c.epochs = r.get_i32();
  c.seed = r.get_u64();
  c.workers = r.get_i32();
  c.subsample = r.get_f64();
  c.noise_exponent = r.get_f64();
  return c;
}

std::string rng_text(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

Rng rng_from_text(const std::string& text) {
  std::istringstream is(text);
  Rng rng;
  is >> rng;
  if (!is) fail(CheckpointError::Kind::Malformed, "bad generator state");
  return rng;
}

void put_matrix(ByteWriter& w, const EmbeddingMatrix& m) {
  for (double x : m.values()) w.put_f64(x);
}

template <class Reader>
EmbeddingMatrix get_matrix(Reader& r, std::size_t rows, std::size_t dim) {
  if (dim != 0 && rows > r.remaining() / 8 / dim) fail(CheckpointError::Kind::Malformed, "matrix larger than payload");
  EmbeddingMatrix m(rows, dim);
  for (double& x : m.values()) x = r.get_f64();
  return m;
}

std::string encode_payload(const Checkpoint& c) {
  ByteWriter w;
  put_config(w, c.config);

  w.put_u64(c.vocab.size());
  for (std::size_t i = 0; i < c.vocab.size(); ++i) {
    w.put_string(c.vocab.words()[i]);
    w.put_u64(c.vocab.counts()[i]);
  }

  w.put_u64(c.phrases.size());
  for (std::size_t i = 0; i < c.phrases.size(); ++i) {
    const PhraseKey& key = c.phrases.key(static_cast<PhraseId>(i));
    w.put_string(key.label);
    w.put_u32(static_cast<std::uint32_t>(key.words.size()));
    for (WordId id : key.words) w.put_i32(id);
    w.put_u64(c.phrases.counts()[i]);
  }

  const TrainingState& s = c.state;
  w.put_u64(s.tokens_processed);
  w.put_i32(s.epochs_completed);
  w.put_u32(static_cast<std::uint32_t>(s.rngs.size()));
  for (const auto& rngs : s.rngs) {
    w.put_string(rng_text(rngs.words));
    w.put_string(rng_text(rngs.phrases));
  }
  w.put_u32(static_cast<std::uint32_t>(s.history.size()));
  for (const auto& e : s.history) {
    w.put_i32(e.epoch);
    w.put_f64(e.word_objective_sum);
    w.put_f64(e.phrase_objective_sum);
    w.put_u64(e.word_pairs);
    w.put_u64(e.phrase_pairs);
    w.put_u64(e.tokens);
    w.put_f64(e.seconds);
  }

  const ModelParams& p = c.params;
  w.put_u8(static_cast<std::uint8_t>(p.mode));
  w.put_i32(p.window);
  w.put_u64(p.input_words.rows());
  w.put_u64(p.input_words.dim());
  w.put_u32(static_cast<std::uint32_t>(p.output_words.size()));
  w.put_u32(static_cast<std::uint32_t>(p.output_phrase_words.size()));
  put_matrix(w, p.input_words);
  for (const auto& m : p.output_words) put_matrix(w, m);
  for (const auto& m : p.output_phrase_words) put_matrix(w, m);
  return w.take();
}

Checkpoint decode_payload(std::string_view payload) {
  auto overrun = [] { fail(CheckpointError::Kind::Malformed, "payload ends early"); };
  detail::ByteReader r(payload, overrun);
  Checkpoint c;
  c.config = get_config(r);

  const std::uint64_t words = r.get_u64();
  std::vector<std::pair<std::string, std::uint64_t>> vocab_entries;
  for (std::uint64_t i = 0; i < words; ++i) {
    std::string word = r.get_string();
    vocab_entries.emplace_back(std::move(word), r.get_u64());
  }
  c.vocab = Vocab::from_entries(std::move(vocab_entries));

  const std::uint64_t phrases = r.get_u64();
  std::vector<std::pair<PhraseKey, std::uint64_t>> phrase_entries;
  for (std::uint64_t i = 0; i < phrases; ++i) {
    PhraseKey key;
    key.label = r.get_string();
    const std::uint32_t n = r.get_u32();
    for (std::uint32_t j = 0; j < n; ++j) {
      const WordId id = r.get_i32();
      if (id < 0 || static_cast<std::uint64_t>(id) >= words) {
        fail(CheckpointError::Kind::Malformed, "phrase refers to unknown word id");
      }
      key.words.push_back(id);
    }
    phrase_entries.emplace_back(std::move(key), r.get_u64());
  }
  c.phrases = PhraseVocab::from_entries(std::move(phrase_entries));

  TrainingState& s = c.state;
  s.tokens_processed = r.get_u64();
  s.epochs_completed = r.get_i32();
  const std::uint32_t workers = r.get_u32();
  for (std::uint32_t i = 0; i < workers; ++i) {
    Rng a = rng_from_text(r.get_string());
    Rng b = rng_from_text(r.get_string());
    s.rngs.push_back(WorkerRngs{a, b});
  }
  const std::uint32_t epochs = r.get_u32();
  for (std::uint32_t i = 0; i < epochs; ++i) {
    EpochReport e;
    e.epoch = r.get_i32();
    e.word_objective_sum = r.get_f64();
    e.phrase_objective_sum = r.get_f64();
    e.word_pairs = r.get_u64();
    e.phrase_pairs = r.get_u64();
    e.tokens = r.get_u64();
    e.seconds = r.get_f64();
    s.history.push_back(e);
  }

  ModelParams& p = c.params;
  p.mode = mode_from_byte(r.get_u8());
  p.window = r.get_i32();
  const std::uint64_t rows = r.get_u64();
  const std::uint64_t dim = r.get_u64();
  const std::uint32_t banks = r.get_u32();
  const std::uint32_t phrase_banks = r.get_u32();
  p.input_words = get_matrix(r, rows, dim);
  for (std::uint32_t i = 0; i < banks; ++i) p.output_words.push_back(get_matrix(r, rows, dim));
  for (std::uint32_t i = 0; i < phrase_banks; ++i) {
    p.output_phrase_words.push_back(get_matrix(r, rows, dim));
  }
  if (r.remaining() != 0) fail(CheckpointError::Kind::Malformed, "trailing bytes in payload");

  try {
    p.validate();
  } catch (const DataError& e) {
    fail(CheckpointError::Kind::Malformed, e.what());
  }
  if (p.vocab_size() != c.vocab.size()) fail(CheckpointError::Kind::Malformed, "vocab/model size mismatch");
  if (p.mode != c.config.mode || p.window != c.config.window || p.dim() != c.config.dim) {
    fail(CheckpointError::Kind::Malformed, "model layout disagrees with config");
  }
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string payload = encode_payload(checkpoint);
  ByteWriter header;
  header.put_raw(kMagic);
  header.put_u32(kCheckpointVersion);
  header.put_u64(payload.size());
  ByteWriter trailer;
  trailer.put_u32(crc_of(payload));

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(CheckpointError::Kind::Io, "cannot write " + tmp.string());
    out.write(header.bytes().data(), static_cast<std::streamsize>(header.bytes().size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.write(trailer.bytes().data(), static_cast<std::streamsize>(trailer.bytes().size()));
    if (!out.flush()) fail(CheckpointError::Kind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(CheckpointError::Kind::Io, "cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(CheckpointError::Kind::Io, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(CheckpointError::Kind::Io, "read error on " + path.string());

  const std::string_view view(bytes);
  const std::size_t magic_len = std::min(view.size(), kMagic.size());
  if (view.substr(0, magic_len) != kMagic.substr(0, magic_len)) {
    fail(CheckpointError::Kind::BadMagic, path.string() + " is not a checkpoint");
  }
  auto truncated = [&] { fail(CheckpointError::Kind::Truncated, path.string() + " is truncated"); };
  if (view.size() < kHeaderSize) truncated();

  detail::ByteReader header(view.substr(kMagic.size(), kHeaderSize - kMagic.size()), truncated);
  const std::uint32_t version = header.get_u32();
  const std::uint64_t length = header.get_u64();
  if (version != kCheckpointVersion) {
    fail(CheckpointError::Kind::VersionMismatch,
         "format version " + std::to_string(version) + ", expected " + std::to_string(kCheckpointVersion));
  }
  if (view.size() - kHeaderSize < kTrailerSize || view.size() - kHeaderSize - kTrailerSize < length) {
    truncated();
  }
  if (view.size() - kHeaderSize - kTrailerSize > length) {
    fail(CheckpointError::Kind::Malformed, "trailing bytes after checkpoint");
  }
  const std::string_view payload = view.substr(kHeaderSize, length);
  detail::ByteReader trailer(view.substr(kHeaderSize + length), truncated);
  if (trailer.get_u32() != crc_of(payload)) {
    fail(CheckpointError::Kind::ChecksumMismatch, "checksum mismatch in " + path.string());
  }
  try {
    return decode_payload(payload);
  } catch (const CheckpointError&) {
    throw;
  } catch (const DataError& e) {
    fail(CheckpointError::Kind::Malformed, e.what());
  }
}

}  // namespace compskip
