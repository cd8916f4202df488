#pragma once

#include <map>
#include <string>
#include <vector>

#include "persuasion/corpus.hpp"
#include "persuasion/game.hpp"

namespace persuasion {

enum class LogSource : std::uint8_t { Sim = 0, Human = 1 };
const char* to_string(LogSource s);

// One (DM, strategy) block of games: the unit shared by simulation output,
// ingested human play, feature building, training and evaluation.
struct Episode {
  std::string dm_id;
  std::string strategy_id;
  LogSource source = LogSource::Sim;
  int target = 9;
  std::vector<GameRecord> games;  // game_index 1..n in order

  bool defeated_expert() const;
  int total_rounds() const;
};

struct InteractionLog {
  std::vector<Episode> episodes;

  int total_rounds() const;
  std::vector<std::string> dm_ids() const;
  std::vector<std::string> strategy_ids() const;
  void append(InteractionLog other);
};

// Reaction-time bin edges from the situation-feature table:
// [0,0.5), [0.5,1), [1,2), [2,3), [3,4), [4,6.5), [6.5,12), [12,20), [20,inf).
int reaction_bin(double seconds);
double reaction_bin_lower_edge(int bin);

// CSV columns: source, dm_id, strategy_id, game_index, round_index,
// hotel_id, shown_review_id, decision, hotel_good, reaction_seconds.
std::string interactions_csv_string(const InteractionLog& log, const Corpus& corpus,
                                    const std::vector<std::string>& comments = {});
void write_interactions_csv(const InteractionLog& log, const Corpus& corpus,
                            const std::string& path,
                            const std::vector<std::string>& comments = {});

// Column-mapped importer. Payoffs are recomputed from decision and
// hotel_good; hotel_good is cross-checked against the corpus; errors carry
// row numbers. The source column is optional (default human).
InteractionLog ingest_interactions_csv(const std::string& path, const Corpus& corpus,
                                       const std::map<std::string, std::string>& schema_map = {});

}  // namespace persuasion
