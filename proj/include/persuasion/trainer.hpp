#pragma once

#include <string>
#include <vector>

#include "persuasion/predictors.hpp"
#include "persuasion/sim.hpp"

namespace persuasion {

// Simulation-mixed training schedule: s_r simulated DMs per base DM are
// generated (fresh each epoch by default) and trained on before each pass
// over the base log.
struct MixSchedule {
  double s_r = 0.0;
  bool regenerate_per_epoch = true;
};

// How the per-epoch simulated block is produced.
struct SimPersonaConfig {
  double eta = 0.01;
  double epsilon = 0.3;
  HeuristicMask mask;
  EpisodeOptions episode;
  int strategies_per_dm = 6;
  int threads = 1;
};

struct MixedTrainReport {
  std::vector<int> sim_dm_count;    // per epoch
  std::vector<double> sim_loss;     // mean per-round; 0 when no sim block
  std::vector<double> base_loss;
  std::vector<double> val_accuracy;  // optional, may stay empty
};

// Per epoch: (1) generate floor(s_r * n_base) simulated DMs (fractional
// part resolved by a probabilistic-rounding draw from the epoch stream) and
// run one pass over them; (2) run one pass over the base log. Simulated DMs
// play uniformly random strategies from the space. With s_r = 0 no
// simulation randomness is consumed and the result is bit-identical to
// plain train() on the base log.
Model mixed_train(const PredictorConfig& config, const InteractionLog& base_log,
                  const MixSchedule& schedule, const SimPersonaConfig& persona,
                  const std::vector<EnumeratedStrategy>& strategy_space, const Corpus& corpus,
                  MixedTrainReport* report = nullptr);

// 15 mixed-trained variants differing only in seed (1..15).
std::vector<Model> mixed_train_ensemble(const PredictorConfig& config,
                                        const InteractionLog& base_log,
                                        const MixSchedule& schedule,
                                        const SimPersonaConfig& persona,
                                        const std::vector<EnumeratedStrategy>& strategy_space,
                                        const Corpus& corpus, int threads = 1);

// Columns: epoch, sim_dms, sim_loss, base_loss, val_accuracy.
std::string training_curve_csv(const MixedTrainReport& report);

}  // namespace persuasion
