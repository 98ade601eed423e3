#include <doctest.h>

#include <fstream>
#include <iterator>

#include "compskip/checkpoint.hpp"
#include "compskip/trainer.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace compskip;

namespace {

struct Setup {
  TrainConfig config;
  Vocab vocab;
  PhraseVocab phrases;
  std::vector<EncodedSentence> encoded;
};

Setup make_setup(Mode mode, int epochs) {
  Setup s;
  s.config.dim = 8;
  s.config.window = 2;
  s.config.mode = mode;
  s.config.min_count = 1;
  s.config.phrase_min_count = 2;
  s.config.epochs = epochs;
  s.config.word_negatives = 3;
  s.config.phrase_negatives = 2;
  s.config.seed = 21;
  auto corpus = fixture::toy_corpus(60, 8);
  s.vocab = build_vocab(corpus, 1);
  if (uses_phrases(mode)) s.phrases = build_phrase_vocab(corpus, s.vocab, 2, false);
  for (const auto& c : corpus) s.encoded.push_back(encode_sentence(c, s.vocab, s.phrases));
  return s;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

CheckpointError::Kind load_error(const std::filesystem::path& p) {
  try {
    load_checkpoint(p);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  FAIL("checkpoint loaded unexpectedly");
  return CheckpointError::Kind::Io;
}

}  // namespace

TEST_CASE("checkpoint round trip preserves everything") {
  auto dir = oracle::temp_dir("ckpt");
  for (Mode mode : fixture::all_modes()) {
    Setup s = make_setup(mode, 2);
    Trainer trainer(s.config, s.vocab, s.phrases, s.encoded);
    trainer.run_epoch();
    const Checkpoint ck = trainer.checkpoint();
    save_checkpoint(ck, dir / "m.ckpt");
    const Checkpoint back = load_checkpoint(dir / "m.ckpt");
    CHECK(back.config == ck.config);
    CHECK(back.vocab == ck.vocab);
    CHECK(back.phrases == ck.phrases);
    CHECK(back.params == ck.params);
    CHECK(back.state.tokens_processed == ck.state.tokens_processed);
    CHECK(back.state.epochs_completed == 1);
    CHECK(back.state.rngs == ck.state.rngs);
    REQUIRE(back.state.history.size() == 1);
    CHECK(back.state.history[0].word_objective_sum == ck.state.history[0].word_objective_sum);
    CHECK(back.state.history[0].word_pairs == ck.state.history[0].word_pairs);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("resuming from a checkpoint matches an uninterrupted run") {
  auto dir = oracle::temp_dir("resume");
  for (Mode mode : fixture::all_modes()) {
    Setup s = make_setup(mode, 3);
    Trainer full(s.config, s.vocab, s.phrases, s.encoded);
    full.run();

    Trainer first(s.config, s.vocab, s.phrases, s.encoded);
    first.run_epoch();
    save_checkpoint(first.checkpoint(), dir / "mid.ckpt");
    Trainer resumed(load_checkpoint(dir / "mid.ckpt"), s.encoded);
    CHECK_FALSE(resumed.finished());
    resumed.run();
    CHECK(resumed.state().epochs_completed == 3);
    CHECK(resumed.params() == full.params());
    CHECK(resumed.state().rngs == full.state().rngs);
    CHECK(resumed.state().tokens_processed == full.state().tokens_processed);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("damaged checkpoints are rejected with the right kind") {
  auto dir = oracle::temp_dir("damaged");
  Setup s = make_setup(Mode::Compositional, 1);
  Trainer trainer(s.config, s.vocab, s.phrases, s.encoded);
  save_checkpoint(trainer.checkpoint(), dir / "ok.ckpt");
  const std::string bytes = read_bytes(dir / "ok.ckpt");
  REQUIRE(bytes.size() > 64);

  write_bytes(dir / "trunc.ckpt", bytes.substr(0, bytes.size() / 2));
  CHECK(load_error(dir / "trunc.ckpt") == CheckpointError::Kind::Truncated);
  write_bytes(dir / "short.ckpt", bytes.substr(0, 5));
  CHECK(load_error(dir / "short.ckpt") == CheckpointError::Kind::Truncated);

  std::string flipped = bytes;
  flipped[bytes.size() / 2] = static_cast<char>(flipped[bytes.size() / 2] ^ 0x10);
  write_bytes(dir / "flip.ckpt", flipped);
  CHECK(load_error(dir / "flip.ckpt") == CheckpointError::Kind::ChecksumMismatch);

  std::string magic = bytes;
  magic[0] = 'X';
  write_bytes(dir / "magic.ckpt", magic);
  CHECK(load_error(dir / "magic.ckpt") == CheckpointError::Kind::BadMagic);

  std::string version = bytes;
  version[8] = static_cast<char>(kCheckpointVersion + 1);
  write_bytes(dir / "version.ckpt", version);
  CHECK(load_error(dir / "version.ckpt") == CheckpointError::Kind::VersionMismatch);

  write_bytes(dir / "extra.ckpt", bytes + "junk");
  CHECK(load_error(dir / "extra.ckpt") == CheckpointError::Kind::Malformed);

  CHECK(load_error(dir / "absent.ckpt") == CheckpointError::Kind::Io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("resume refuses a checkpoint whose state does not fit") {
  Setup s = make_setup(Mode::Baseline, 2);
  Trainer trainer(s.config, s.vocab, s.phrases, s.encoded);
  Checkpoint ck = trainer.checkpoint();
  ck.state.rngs.push_back(ck.state.rngs.front());
  CHECK_THROWS_AS(Trainer(ck, s.encoded), DataError);

  Checkpoint wrong_mode = trainer.checkpoint();
  wrong_mode.params.mode = Mode::Positional;
  CHECK_THROWS_AS(Trainer(wrong_mode, s.encoded), DataError);
}
