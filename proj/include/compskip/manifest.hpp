#pragma once

// Run manifest: a flat `key=value` text file holding everything needed to
// repeat a training run, plus digests of its input corpus and its output.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compskip/model.hpp"
#include "compskip/training_state.hpp"

namespace compskip {

struct RunManifest {
  TrainConfig config;
  std::string corpus_path;
  std::string corpus_digest;  // sha256 of the corpus bytes, taken before training
  std::size_t vocab_size = 0;
  std::size_t phrase_vocab_size = 0;
  std::uint64_t corpus_tokens = 0;
  std::string resumed_from;
  std::vector<EpochReport> epochs;
  std::string params_digest;  // sha256 over every parameter matrix
  double wall_clock_seconds = 0.0;
};

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

ManifestEntries manifest_entries(const RunManifest& manifest);
ManifestEntries config_entries(const TrainConfig& config);
/// Throws DataError on a missing or malformed config key.
TrainConfig config_from_entries(const ManifestEntries& entries);

/// True for keys whose values depend on wall-clock time.
bool is_wall_clock_key(std::string_view key);

/// Writes to a temporary sibling and renames it into place.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
ManifestEntries read_manifest_entries(const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);
std::string params_digest(const ModelParams& params);

}  // namespace compskip
