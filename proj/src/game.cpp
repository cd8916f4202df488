#include "persuasion/game.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace persuasion {

bool hotel_quality(std::span<const double> scores, const GameParams& params) {
  if (static_cast<int>(scores.size()) != params.reviews_per_hotel) {
    throw std::invalid_argument("hotel_quality: expected " +
                                std::to_string(params.reviews_per_hotel) +
                                " scores, got " + std::to_string(scores.size()));
  }
  double sum = 0.0;
  for (double s : scores) {
    if (s < 1.0 || s > 10.0) {
      throw std::invalid_argument("hotel_quality: score out of [1,10]: " + std::to_string(s));
    }
    sum += s;
  }
  return sum / static_cast<double>(scores.size()) >= params.good_threshold;
}

Hotel Hotel::make(std::string id, std::vector<Review> reviews, const GameParams& params) {
  std::vector<double> scores;
  scores.reserve(reviews.size());
  for (const Review& r : reviews) scores.push_back(r.score);
  Hotel h;
  h.good = hotel_quality(scores, params);  // validates length and ranges
  h.hotel_id = std::move(id);
  h.reviews = std::move(reviews);
  h.mean_score = std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
  return h;
}

int round_payoff(Decision decision, bool good) {
  return (decision == Decision::Go) == good ? 1 : 0;
}

int expert_reward(std::span<const RoundRecord> rounds) {
  int n = 0;
  for (const RoundRecord& r : rounds) n += r.decision == Decision::Go ? 1 : 0;
  return n;
}

bool defeated(int total_payoff, int target) {
  if (total_payoff < 0 || total_payoff > kRoundsPerGame) {
    throw std::invalid_argument("defeated: total_payoff out of range");
  }
  if (target < 8 || target > 10) {
    throw std::invalid_argument("defeated: target must be in 8..10");
  }
  return total_payoff >= target;
}

}  // namespace persuasion
