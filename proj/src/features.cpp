#include "persuasion/features.hpp"

#include <sstream>
#include <stdexcept>

namespace persuasion {

RoundFeatureVector build_round_features(std::span<const RoundRecord> episode_history,
                                        const Review& shown_review, int reaction_bin,
                                        bool simulated) {
  RoundFeatureVector v{};
  for (int f = 0; f < kEfCount; ++f) v[f] = shown_review.ef[f];
  int points = 0;
  for (const RoundRecord& r : episode_history) points += r.payoff;
  int rounds = static_cast<int>(episode_history.size());
  if (!episode_history.empty()) {
    const RoundRecord& prev = episode_history.back();
    v[36] = prev.decision == Decision::Go ? 1.0 : 0.0;
    v[37] = prev.decision == Decision::Go ? 0.0 : 1.0;
    v[38] = prev.hotel_good ? 1.0 : 0.0;
    v[39] = prev.hotel_good ? 0.0 : 1.0;
  }
  v[40] = points;
  v[41] = rounds;
  v[42] = points > rounds ? 1.0 : 0.0;
  v[43] = points > rounds ? 0.0 : 1.0;
  if (!simulated) {
    if (reaction_bin < 0 || reaction_bin > 8) {
      throw std::invalid_argument("reaction_bin out of 0..8");
    }
    v[44 + reaction_bin] = 1.0;
  }
  return v;
}

EpisodeTensor build_episode_tensor(const Episode& episode, const Corpus& corpus) {
  if (episode.games.empty()) throw std::invalid_argument("empty episode");
  EpisodeTensor tensor;
  tensor.dm_id = episode.dm_id;
  tensor.strategy_id = episode.strategy_id;
  tensor.simulated = episode.source == LogSource::Sim;
  std::vector<RoundRecord> history;
  for (const GameRecord& g : episode.games) {
    bool first = true;
    for (const RoundRecord& r : g.rounds) {
      if (r.hotel < 0 || r.hotel >= static_cast<int>(corpus.hotels.size())) {
        throw std::out_of_range("round references hotel outside the corpus");
      }
      const Review& review = corpus.hotels[r.hotel].reviews.at(r.review_slot);
      tensor.rounds.push_back(build_round_features(history, review, r.reaction_bin,
                                                   episode.source == LogSource::Sim));
      tensor.labels.push_back(r.decision == Decision::Go ? 1 : 0);
      tensor.game_start.push_back(first ? 1 : 0);
      tensor.review_index.push_back(corpus.review_index(r.hotel, r.review_slot));
      tensor.reaction_bins.push_back(static_cast<std::uint8_t>(r.reaction_bin));
      history.push_back(r);
      first = false;
    }
  }
  return tensor;
}

std::vector<EpisodeTensor> build_dataset(const InteractionLog& log, const Corpus& corpus) {
  std::vector<EpisodeTensor> out;
  out.reserve(log.episodes.size());
  for (const Episode& e : log.episodes) out.push_back(build_episode_tensor(e, corpus));
  return out;
}

std::string feature_matrix_csv(const InteractionLog& log, const Corpus& corpus) {
  std::ostringstream out;
  out << "dm_id,strategy_id,row";
  for (int i = 0; i < kFeatureCount; ++i) out << ",f" << i;
  out << ",label\n";
  for (const Episode& e : log.episodes) {
    EpisodeTensor tensor = build_episode_tensor(e, corpus);
    for (std::size_t i = 0; i < tensor.rounds.size(); ++i) {
      out << e.dm_id << ',' << e.strategy_id << ',' << i;
      for (double f : tensor.rounds[i]) out << ',' << f;
      out << ',' << static_cast<int>(tensor.labels[i]) << "\n";
    }
  }
  return out.str();
}

}  // namespace persuasion
