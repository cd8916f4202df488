#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace persuasion {

inline constexpr int kEfCount = 36;
inline constexpr int kRoundsPerGame = 10;

// The hotel-quality threshold and reviews-per-hotel are fixed game
// parameters; tests may override them through GameParams.
struct GameParams {
  int reviews_per_hotel = 7;
  double good_threshold = 8.0;
};
inline constexpr GameParams kDefaultGameParams{};

enum class Decision : std::uint8_t { Stay = 0, Go = 1 };

struct Review {
  std::string review_id;
  double score = 0.0;  // in [1, 10]
  std::array<std::uint8_t, kEfCount> ef{};
};

struct Hotel {
  std::string hotel_id;
  std::vector<Review> reviews;  // exactly 7
  double mean_score = 0.0;
  bool good = false;

  static Hotel make(std::string id, std::vector<Review> reviews,
                    const GameParams& params = kDefaultGameParams);
};

// One decision within a game. Hotel/review are stored as indices into the
// owning corpus; reaction_bin is always 0 for simulated DMs.
struct RoundRecord {
  int round_index = 0;  // 1..10
  std::int32_t hotel = -1;
  std::int8_t review_slot = -1;  // 0..6 within the hotel
  Decision decision = Decision::Stay;
  bool hotel_good = false;
  std::int8_t payoff = 0;
  std::int8_t reaction_bin = 0;  // 0..8
};

struct GameRecord {
  std::string dm_id;
  std::string strategy_id;
  int game_index = 0;  // ordinal within the DM-bot episode, from 1
  std::vector<RoundRecord> rounds;
  int total_payoff = 0;
};

// True iff the mean of the 7 scores reaches the threshold (inclusive).
// Throws std::invalid_argument on wrong length or out-of-range scores.
bool hotel_quality(std::span<const double> scores,
                   const GameParams& params = kDefaultGameParams);

// 1 iff the decision matches the hotel quality (go to good / stay from bad).
int round_payoff(Decision decision, bool good);

// The expert is rewarded once per Go decision, regardless of outcome.
int expert_reward(std::span<const RoundRecord> rounds);

// Whether the DM reached the bot's target payoff. Targets live in 8..10.
bool defeated(int total_payoff, int target);

}  // namespace persuasion
