#pragma once

// Binary checkpoint: magic, version, payload length, payload, CRC-32.
// Byte layout is documented in docs/checkpoint_format.md.

#include <filesystem>

#include "compskip/corpus.hpp"
#include "compskip/error.hpp"
#include "compskip/model.hpp"
#include "compskip/training_state.hpp"

namespace compskip {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  Vocab vocab;
  PhraseVocab phrases;
  ModelParams params;
  TrainingState state;
};

class CheckpointError : public DataError {
 public:
  enum class Kind { Io, BadMagic, VersionMismatch, Truncated, ChecksumMismatch, Malformed };

  CheckpointError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Written to a temporary sibling and renamed into place.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace compskip
