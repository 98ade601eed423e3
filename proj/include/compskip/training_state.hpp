#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "compskip/sampling.hpp"

namespace compskip {

/// Separate streams keep word-level draws independent of whether the
/// phrase level runs.
struct WorkerRngs {
  Rng words;
  Rng phrases;

  bool operator==(const WorkerRngs&) const = default;
};

struct EpochReport {
  int epoch = 0;
  double word_objective_sum = 0.0;
  double phrase_objective_sum = 0.0;
  std::uint64_t word_pairs = 0;
  std::uint64_t phrase_pairs = 0;
  std::uint64_t tokens = 0;
  double seconds = 0.0;

  double mean_word_objective() const;
  double mean_phrase_objective() const;
  double tokens_per_second() const;
};

/// `epoch i E_w=<val> E_p=<val> tokens/s=<val>`
std::string format_epoch_line(const EpochReport& report);

struct TrainingState {
  std::uint64_t tokens_processed = 0;
  int epochs_completed = 0;
  std::vector<WorkerRngs> rngs;
  std::vector<EpochReport> history;
};

}  // namespace compskip
