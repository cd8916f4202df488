#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "persuasion/corpus.hpp"
#include "persuasion/game.hpp"
#include "persuasion/log.hpp"

namespace persuasion {

// Per-round feature layout (53 values):
//   [0..35]  EF bits of the shown review, in fixture order (9 positive
//            topics, 8 positive-part properties, 8 negative topics,
//            8 negative-part properties, 3 length-ratio bins)
//   [36..37] previous action one-hot (go, stay); zero at episode start
//   [38..39] previous hotel quality one-hot (good, bad); zero at start
//   [40]     points earned so far in the episode
//   [41]     rounds played so far in the episode
//   [42..43] points bigger than rounds played one-hot (bigger, not bigger)
//   [44..52] reaction-time bin one-hot; all zero for simulated rounds
inline constexpr int kFeatureCount = 53;

using RoundFeatureVector = std::array<double, kFeatureCount>;

struct EpisodeTensor {
  std::string dm_id;
  std::string strategy_id;
  std::vector<RoundFeatureVector> rounds;  // in play order
  std::vector<std::uint8_t> labels;        // 1 = Go
  std::vector<std::uint8_t> game_start;    // 1 at the first round of a game
  std::vector<int> review_index;           // global review index per round
  std::vector<std::uint8_t> reaction_bins;
  bool simulated = true;
};

// `episode_history` holds all prior rounds of the same episode (crossing
// game boundaries); counts accumulate over it, prev_* reads its last round.
RoundFeatureVector build_round_features(std::span<const RoundRecord> episode_history,
                                        const Review& shown_review, int reaction_bin,
                                        bool simulated);

EpisodeTensor build_episode_tensor(const Episode& episode, const Corpus& corpus);

std::vector<EpisodeTensor> build_dataset(const InteractionLog& log, const Corpus& corpus);

// One row per round: ids, the 53 feature columns and the label.
std::string feature_matrix_csv(const InteractionLog& log, const Corpus& corpus);

}  // namespace persuasion
