#include "persuasion/log.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "persuasion/csv.hpp"

namespace persuasion {

const char* to_string(LogSource s) { return s == LogSource::Sim ? "sim" : "human"; }

bool Episode::defeated_expert() const {
  return !games.empty() && games.back().total_payoff >= target;
}

int Episode::total_rounds() const {
  int n = 0;
  for (const GameRecord& g : games) n += static_cast<int>(g.rounds.size());
  return n;
}

int InteractionLog::total_rounds() const {
  int n = 0;
  for (const Episode& e : episodes) n += e.total_rounds();
  return n;
}

std::vector<std::string> InteractionLog::dm_ids() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Episode& e : episodes) {
    if (seen.insert(e.dm_id).second) out.push_back(e.dm_id);
  }
  return out;
}

std::vector<std::string> InteractionLog::strategy_ids() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Episode& e : episodes) {
    if (seen.insert(e.strategy_id).second) out.push_back(e.strategy_id);
  }
  return out;
}

void InteractionLog::append(InteractionLog other) {
  for (auto& e : other.episodes) episodes.push_back(std::move(e));
}

namespace {
constexpr double kBinEdges[] = {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.5, 12.0, 20.0};
}

int reaction_bin(double seconds) {
  int bin = 0;
  for (int i = 8; i >= 0; --i) {
    if (seconds >= kBinEdges[i]) {
      bin = i;
      break;
    }
  }
  return bin;
}

double reaction_bin_lower_edge(int bin) { return kBinEdges[bin]; }

std::string interactions_csv_string(const InteractionLog& log, const Corpus& corpus,
                                    const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << "source,dm_id,strategy_id,game_index,round_index,hotel_id,shown_review_id,"
         "decision,hotel_good,reaction_seconds\n";
  char buf[32];
  for (const Episode& e : log.episodes) {
    for (const GameRecord& g : e.games) {
      for (const RoundRecord& r : g.rounds) {
        const Hotel& h = corpus.hotels.at(r.hotel);
        std::snprintf(buf, sizeof(buf), "%g", reaction_bin_lower_edge(r.reaction_bin));
        out << to_string(e.source) << ',' << e.dm_id << ',' << e.strategy_id << ','
            << g.game_index << ',' << r.round_index << ',' << h.hotel_id << ','
            << h.reviews.at(r.review_slot).review_id << ','
            << (r.decision == Decision::Go ? "go" : "stay") << ',' << (r.hotel_good ? 1 : 0)
            << ',' << buf << "\n";
      }
    }
  }
  return out.str();
}

void write_interactions_csv(const InteractionLog& log, const Corpus& corpus,
                            const std::string& path,
                            const std::vector<std::string>& comments) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << interactions_csv_string(log, corpus, comments);
}

InteractionLog ingest_interactions_csv(const std::string& path, const Corpus& corpus,
                                       const std::map<std::string, std::string>& schema_map) {
  CsvTable table = read_csv(path);
  auto col = [&](const std::string& role, bool required) {
    std::string name = role;
    if (auto it = schema_map.find(role); it != schema_map.end()) name = it->second;
    int c = table.column(name);
    if (c < 0 && required) {
      throw IngestError(IngestError::Kind::MissingColumn,
                        path + ": missing column '" + name + "' for role '" + role + "'");
    }
    return c;
  };
  int c_src = col("source", false);
  int c_dm = col("dm_id", true);
  int c_strat = col("strategy_id", true);
  int c_game = col("game_index", true);
  int c_round = col("round_index", true);
  int c_hotel = col("hotel_id", true);
  int c_review = col("shown_review_id", true);
  int c_dec = col("decision", true);
  int c_good = col("hotel_good", true);
  int c_react = col("reaction_seconds", true);

  InteractionLog log;
  Episode* cur = nullptr;
  GameRecord* cur_game = nullptr;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto& cells = table.rows[row];
    auto fail = [&](IngestError::Kind kind, const std::string& msg) -> void {
      throw IngestError(kind, path + ": row " + std::to_string(row + 2) + ": " + msg);
    };
    const std::string& dm = cells.at(c_dm);
    const std::string& strat = cells.at(c_strat);
    if (cur == nullptr || cur->dm_id != dm || cur->strategy_id != strat) {
      log.episodes.emplace_back();
      cur = &log.episodes.back();
      cur->dm_id = dm;
      cur->strategy_id = strat;
      cur->source = LogSource::Human;
      if (c_src >= 0) {
        const std::string& s = cells.at(c_src);
        if (s == "sim") {
          cur->source = LogSource::Sim;
        } else if (s != "human") {
          fail(IngestError::Kind::BadRow, "unknown source '" + s + "'");
        }
      }
      cur_game = nullptr;
    }
    int game_index = 0, round_index = 0;
    double reaction = 0.0;
    try {
      game_index = std::stoi(cells.at(c_game));
      round_index = std::stoi(cells.at(c_round));
      reaction = std::stod(cells.at(c_react));
    } catch (const std::exception&) {
      fail(IngestError::Kind::BadRow, "unparsable numeric field");
    }
    if (cur_game == nullptr || cur_game->game_index != game_index) {
      int expected = cur_game == nullptr ? 1 : cur_game->game_index + 1;
      if (game_index != expected) {
        fail(IngestError::Kind::Inconsistent,
             "game_index " + std::to_string(game_index) + ", expected " +
                 std::to_string(expected));
      }
      cur->games.emplace_back();
      cur_game = &cur->games.back();
      cur_game->dm_id = dm;
      cur_game->strategy_id = strat;
      cur_game->game_index = game_index;
    }
    if (round_index != static_cast<int>(cur_game->rounds.size()) + 1 ||
        round_index > kRoundsPerGame) {
      fail(IngestError::Kind::Inconsistent, "round_index " + std::to_string(round_index) +
                                                " out of order within game");
    }

    RoundRecord r;
    r.round_index = round_index;
    int hotel = -1;
    try {
      hotel = corpus.hotel_index(cells.at(c_hotel));
    } catch (const std::out_of_range&) {
      fail(IngestError::Kind::Inconsistent, "unknown hotel_id " + cells.at(c_hotel));
    }
    r.hotel = hotel;
    const Hotel& h = corpus.hotels[hotel];
    r.review_slot = -1;
    for (int j = 0; j < static_cast<int>(h.reviews.size()); ++j) {
      if (h.reviews[j].review_id == cells.at(c_review)) {
        r.review_slot = static_cast<std::int8_t>(j);
        break;
      }
    }
    if (r.review_slot < 0) {
      fail(IngestError::Kind::Inconsistent,
           "review " + cells.at(c_review) + " does not belong to hotel " + h.hotel_id);
    }
    const std::string& dec = cells.at(c_dec);
    if (dec == "go") {
      r.decision = Decision::Go;
    } else if (dec == "stay") {
      r.decision = Decision::Stay;
    } else {
      fail(IngestError::Kind::BadRow, "decision must be go|stay, got '" + dec + "'");
    }
    const std::string& good = cells.at(c_good);
    if (good != "0" && good != "1") {
      fail(IngestError::Kind::BadRow, "hotel_good must be 0|1");
    }
    r.hotel_good = good == "1";
    if (r.hotel_good != h.good) {
      fail(IngestError::Kind::Inconsistent,
           "hotel_good disagrees with corpus for hotel " + h.hotel_id);
    }
    r.payoff = static_cast<std::int8_t>(round_payoff(r.decision, r.hotel_good));
    if (reaction < 0.0) fail(IngestError::Kind::BadRow, "negative reaction time");
    r.reaction_bin = static_cast<std::int8_t>(reaction_bin(reaction));
    cur_game->rounds.push_back(r);
    cur_game->total_payoff += r.payoff;
  }
  return log;
}

}  // namespace persuasion
