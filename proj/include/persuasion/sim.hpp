#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "persuasion/corpus.hpp"
#include "persuasion/log.hpp"
#include "persuasion/rng.hpp"
#include "persuasion/strategy.hpp"

namespace persuasion {

// Initial probabilities over the Trustful, Language-based and Random
// heuristics. Must be nonnegative and sum to 1.
struct NatureVector {
  double trustful = 1.0 / 3.0;
  double language = 1.0 / 3.0;
  double random = 1.0 / 3.0;

  void validate() const;
  static NatureVector from_weights(double w1, double w2, double w3);
};

// The evolving 4-way mixture; index 0 is the oracle weight, which absorbs
// the mass the three base heuristics lose over rounds.
struct TemperamentState {
  double oracle = 0.0;
  double trustful = 0.0;
  double language = 0.0;
  double random = 0.0;
  int t = 0;  // rounds since initialization

  double sum() const { return oracle + trustful + language + random; }
};

TemperamentState initial_temperament(const NatureVector& nature);

// One multiplicative-weights step: each base weight is scaled by
// (1 - gamma_i) with gamma_i ~ Uniform(-eta/10, eta) drawn independently;
// if the base weights exceed 1 they are rescaled proportionally to sum 1,
// and the oracle weight takes the remainder.
void update_temperament(TemperamentState& state, double eta, Rng& rng);
// Test hook with the three scale draws injected.
void update_temperament_with(TemperamentState& state, double g1, double g2, double g3);

// Predicts a review's score. Stands in for an external learned scorer;
// deterministic given its own seed/state.
class ReviewScorer {
 public:
  virtual ~ReviewScorer() = default;
  virtual double score(const Corpus& corpus, int hotel, int slot) const = 0;
};

// True score plus seeded noise (std sigma), clamped to [1,10]. The noise is
// a pure function of (seed, review), so a review always reads the same.
class NoisyOracleScorer : public ReviewScorer {
 public:
  NoisyOracleScorer(std::uint64_t seed, double sigma = 0.5) : seed_(seed), sigma_(sigma) {}
  double score(const Corpus& corpus, int hotel, int slot) const override;

 private:
  std::uint64_t seed_;
  double sigma_;
};

// Fixed review_id -> predicted score map loaded from a two-column CSV.
class FileScorer : public ReviewScorer {
 public:
  static FileScorer from_csv(const std::string& path);
  double score(const Corpus& corpus, int hotel, int slot) const override;

 private:
  std::unordered_map<std::string, double> scores_;
};

struct DmPersona {
  std::string dm_id;
  NatureVector nature;
  double eta = 0.01;      // improvement rate, in [0,1]
  double epsilon = 0.3;   // std of the DM's review-score estimation noise
  int trust_window = 1;   // K, sampled once per DM
  std::shared_ptr<const ReviewScorer> scorer;
};

enum class TemperamentScope : std::uint8_t {
  PerGame,  // reset at the start of every 10-round game (literal reading)
  PerBot,   // reset once per episode; weights accumulate across games
};

// Trustful: Go iff the estimated scores of the last min(K, n) rounds all
// matched the revealed hotel qualities; an empty history is a vacuous match.
Decision decide_trustful(std::span<const std::uint8_t> match_history, int trust_window);
Decision decide_oracle(bool hotel_good);
Decision decide_language(const ReviewScorer& scorer, const Corpus& corpus, int hotel, int slot,
                         double threshold = 8.0);

struct DecisionContext {
  const Corpus* corpus = nullptr;
  int hotel = -1;
  int slot = -1;
  bool hotel_good = false;
  std::span<const std::uint8_t> trust_matches;  // episode-scoped, oldest first
};

// Samples a heuristic from the temperament and dispatches.
Decision decide(const DmPersona& persona, const TemperamentState& temperament,
                const DecisionContext& ctx, Rng& rng);

struct EpisodeOptions {
  int target = 9;  // SIM_PAY_TH
  int cap = 100;   // games per expert
  TemperamentScope scope = TemperamentScope::PerGame;
};

// Plays 10-round games against one expert until the target payoff is
// reached or the cap is hit. Hotels are drawn without replacement within a
// game and resampled wholesale after a failed game.
Episode play_episode(const DmPersona& persona, const EnumeratedStrategy& strategy,
                     const Corpus& corpus, const EpisodeOptions& options, Rng& rng);

using PersonaSampler = std::function<DmPersona(int dm_index, Rng& rng)>;

struct SimulateOptions {
  EpisodeOptions episode;
  int strategies_per_dm = 6;
  int threads = 1;
};

// For each DM: sample a persona, draw 6 strategies uniformly without
// replacement from the whole space, play the episodes in order. One PRNG
// stream per DM; output is identical for any thread count.
InteractionLog simulate_dataset(int n_dms, const PersonaSampler& sampler,
                                const std::vector<EnumeratedStrategy>& strategy_space,
                                const Corpus& corpus, std::uint64_t seed,
                                const SimulateOptions& options = {});

// Heuristic on/off mask for ablations; all off = oracle-only nature (0,0,0).
struct HeuristicMask {
  bool trustful = true;
  bool language = true;
  bool random = true;
};

// The reference persona law: nature from equal enabled weights,
// eta = 0.01, epsilon = 0.3, K ~ Uniform{1,2,3}, shared noisy-oracle scorer.
// DM ids are "<prefix>%05d".
PersonaSampler default_persona_law(std::uint64_t scorer_seed, double eta = 0.01,
                                   double epsilon = 0.3, HeuristicMask mask = {},
                                   const std::string& dm_prefix = "sim");

// The pseudo-human test population: nature ~ Dirichlet(2,2,2),
// eta ~ U[0.005,0.02], epsilon ~ U[0.2,0.4], K ~ Uniform{1..4}, and a
// scorer seeded differently from the training law.
PersonaSampler perturbed_persona_law(std::uint64_t scorer_seed);

}  // namespace persuasion
