#include "persuasion/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "persuasion/csv.hpp"

namespace persuasion {

void NatureVector::validate() const {
  if (trustful < 0 || language < 0 || random < 0 ||
      std::abs(trustful + language + random - 1.0) > 1e-12) {
    throw std::invalid_argument("nature vector must be a probability vector");
  }
}

NatureVector NatureVector::from_weights(double w1, double w2, double w3) {
  double sum = w1 + w2 + w3;
  NatureVector n;
  if (sum <= 0.0) {
    // All heuristics disabled: the DM is pure oracle from round one.
    n.trustful = n.language = n.random = 0.0;
    return n;
  }
  n.trustful = w1 / sum;
  n.language = w2 / sum;
  n.random = w3 / sum;
  return n;
}

TemperamentState initial_temperament(const NatureVector& nature) {
  TemperamentState s;
  s.trustful = nature.trustful;
  s.language = nature.language;
  s.random = nature.random;
  s.oracle = 1.0 - (s.trustful + s.language + s.random);
  s.t = 0;
  return s;
}

void update_temperament_with(TemperamentState& state, double g1, double g2, double g3) {
  state.trustful *= 1.0 - g1;
  state.language *= 1.0 - g2;
  state.random *= 1.0 - g3;
  double sum = state.trustful + state.language + state.random;
  if (sum > 1.0) {
    // Trim rule: proportional rescale of the base weights to sum 1.
    state.trustful /= sum;
    state.language /= sum;
    state.random /= sum;
    sum = 1.0;
  }
  state.oracle = 1.0 - sum;
  state.t += 1;
}

void update_temperament(TemperamentState& state, double eta, Rng& rng) {
  double g1 = rng.uniform(-eta / 10.0, eta);
  double g2 = rng.uniform(-eta / 10.0, eta);
  double g3 = rng.uniform(-eta / 10.0, eta);
  update_temperament_with(state, g1, g2, g3);
}

double NoisyOracleScorer::score(const Corpus& corpus, int hotel, int slot) const {
  double true_score = corpus.hotels.at(hotel).reviews.at(slot).score;
  Rng rng(derive_seed(seed_, {kStreamScorer, static_cast<std::uint64_t>(hotel),
                              static_cast<std::uint64_t>(slot)}));
  return std::clamp(true_score + rng.normal(0.0, sigma_), 1.0, 10.0);
}

FileScorer FileScorer::from_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  int c_id = table.column("review_id");
  int c_score = table.column("predicted_score");
  if (c_id < 0 || c_score < 0) {
    throw std::runtime_error(path + ": scorer CSV needs review_id,predicted_score columns");
  }
  FileScorer scorer;
  for (const auto& row : table.rows) {
    scorer.scores_[row.at(c_id)] = std::stod(row.at(c_score));
  }
  return scorer;
}

double FileScorer::score(const Corpus& corpus, int hotel, int slot) const {
  const std::string& id = corpus.hotels.at(hotel).reviews.at(slot).review_id;
  auto it = scores_.find(id);
  if (it == scores_.end()) throw std::out_of_range("no predicted score for review " + id);
  return it->second;
}

Decision decide_trustful(std::span<const std::uint8_t> match_history, int trust_window) {
  int n = static_cast<int>(match_history.size());
  int k = std::min(trust_window, n);
  for (int i = 0; i < k; ++i) {
    if (!match_history[n - 1 - i]) return Decision::Stay;
  }
  return Decision::Go;  // vacuous over an empty window
}

Decision decide_oracle(bool hotel_good) { return hotel_good ? Decision::Go : Decision::Stay; }

Decision decide_language(const ReviewScorer& scorer, const Corpus& corpus, int hotel, int slot,
                         double threshold) {
  return scorer.score(corpus, hotel, slot) >= threshold ? Decision::Go : Decision::Stay;
}

Decision decide(const DmPersona& persona, const TemperamentState& temperament,
                const DecisionContext& ctx, Rng& rng) {
  double u = rng.uniform01();
  if (u < temperament.oracle) {
    return decide_oracle(ctx.hotel_good);
  }
  u -= temperament.oracle;
  if (u < temperament.trustful) {
    return decide_trustful(ctx.trust_matches, persona.trust_window);
  }
  u -= temperament.trustful;
  if (u < temperament.language) {
    return decide_language(*persona.scorer, *ctx.corpus, ctx.hotel, ctx.slot);
  }
  return rng.bernoulli(0.5) ? Decision::Go : Decision::Stay;
}

Episode play_episode(const DmPersona& persona, const EnumeratedStrategy& strategy,
                     const Corpus& corpus, const EpisodeOptions& options, Rng& rng) {
  const int n_hotels = static_cast<int>(corpus.hotels.size());
  if (n_hotels < kRoundsPerGame) {
    throw std::invalid_argument("play_episode: corpus smaller than one game");
  }
  Episode episode;
  episode.dm_id = persona.dm_id;
  episode.strategy_id = strategy.id;
  episode.source = LogSource::Sim;
  episode.target = options.target;

  std::vector<int> order(n_hotels);
  for (int i = 0; i < n_hotels; ++i) order[i] = i;
  std::vector<std::uint8_t> trust_matches;  // episode-scoped
  TemperamentState temperament = initial_temperament(persona.nature);

  for (int game_index = 1; game_index <= options.cap; ++game_index) {
    if (options.scope == TemperamentScope::PerGame || game_index == 1) {
      temperament = initial_temperament(persona.nature);
    }
    // 10 fresh hotels, without replacement within the game.
    for (int k = 0; k < kRoundsPerGame; ++k) {
      int j = k + static_cast<int>(rng.below(order.size() - k));
      std::swap(order[k], order[j]);
    }
    GameRecord game;
    game.dm_id = persona.dm_id;
    game.strategy_id = strategy.id;
    game.game_index = game_index;
    for (int t = 1; t <= kRoundsPerGame; ++t) {
      const int hotel = order[t - 1];
      const Hotel& h = corpus.hotels[hotel];
      int slot = select_review(strategy.tree, game.rounds, h);
      // The DM's own estimate of the shown score, drawn once per round and
      // fed into the trustful history after the outcome is revealed.
      double est = h.reviews[slot].score + rng.normal(0.0, persona.epsilon);
      DecisionContext ctx;
      ctx.corpus = &corpus;
      ctx.hotel = hotel;
      ctx.slot = slot;
      ctx.hotel_good = h.good;
      ctx.trust_matches = trust_matches;
      RoundRecord r;
      r.round_index = t;
      r.hotel = hotel;
      r.review_slot = static_cast<std::int8_t>(slot);
      r.decision = decide(persona, temperament, ctx, rng);
      r.hotel_good = h.good;
      r.payoff = static_cast<std::int8_t>(round_payoff(r.decision, h.good));
      r.reaction_bin = 0;
      game.total_payoff += r.payoff;
      game.rounds.push_back(r);
      trust_matches.push_back(((est >= 8.0) == h.good) ? 1 : 0);
      update_temperament(temperament, persona.eta, rng);
    }
    bool done = game.total_payoff >= options.target;
    episode.games.push_back(std::move(game));
    if (done) break;
  }
  return episode;
}

InteractionLog simulate_dataset(int n_dms, const PersonaSampler& sampler,
                                const std::vector<EnumeratedStrategy>& strategy_space,
                                const Corpus& corpus, std::uint64_t seed,
                                const SimulateOptions& options) {
  if (strategy_space.empty()) throw std::invalid_argument("empty strategy space");
  std::vector<std::vector<Episode>> per_dm(n_dms);

  auto run_dm = [&](int d) {
    Rng rng(derive_seed(seed, {kStreamDm, static_cast<std::uint64_t>(d)}));
    DmPersona persona = sampler(d, rng);
    // Draw the DM's experts uniformly without replacement.
    int n = static_cast<int>(strategy_space.size());
    int k = std::min(options.strategies_per_dm, n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
    }
    for (int i = 0; i < k; ++i) {
      per_dm[d].push_back(
          play_episode(persona, strategy_space[idx[i]], corpus, options.episode, rng));
    }
  };

  int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (int d = 0; d < n_dms; ++d) run_dm(d);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int d = w; d < n_dms; d += threads) run_dm(d);
      });
    }
    for (auto& t : pool) t.join();
  }

  InteractionLog log;
  for (auto& eps : per_dm) {
    for (auto& e : eps) log.episodes.push_back(std::move(e));
  }
  return log;
}

PersonaSampler default_persona_law(std::uint64_t scorer_seed, double eta, double epsilon,
                                   HeuristicMask mask, const std::string& dm_prefix) {
  auto scorer = std::make_shared<NoisyOracleScorer>(scorer_seed, 0.5);
  return [scorer, eta, epsilon, mask, dm_prefix](int dm_index, Rng& rng) {
    DmPersona p;
    char id[16];
    std::snprintf(id, sizeof(id), "%05d", dm_index);
    p.dm_id = dm_prefix + id;
    p.nature = NatureVector::from_weights(mask.trustful ? 1.0 : 0.0,
                                          mask.language ? 1.0 : 0.0, mask.random ? 1.0 : 0.0);
    p.eta = eta;
    p.epsilon = epsilon;
    p.trust_window = 1 + static_cast<int>(rng.below(3));  // K ~ Uniform{1,2,3}
    p.scorer = scorer;
    return p;
  };
}

PersonaSampler perturbed_persona_law(std::uint64_t scorer_seed) {
  auto scorer = std::make_shared<NoisyOracleScorer>(scorer_seed, 0.5);
  return [scorer](int dm_index, Rng& rng) {
    DmPersona p;
    char id[16];
    std::snprintf(id, sizeof(id), "pdm%05d", dm_index);
    p.dm_id = id;
    // Dirichlet(2,2,2) via normalized Gamma(2) draws.
    double g[3];
    for (double& v : g) {
      double u1 = 1.0 - rng.uniform01();
      double u2 = 1.0 - rng.uniform01();
      v = -std::log(u1) - std::log(u2);
    }
    p.nature = NatureVector::from_weights(g[0], g[1], g[2]);
    p.eta = rng.uniform(0.005, 0.02);
    p.epsilon = rng.uniform(0.2, 0.4);
    p.trust_window = 1 + static_cast<int>(rng.below(4));  // K ~ Uniform{1..4}
    p.scorer = scorer;
    return p;
  };
}

}  // namespace persuasion
