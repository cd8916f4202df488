#include "persuasion/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

namespace persuasion {

namespace {

int count_dms(const InteractionLog& log) {
  std::set<std::string> ids;
  for (const Episode& e : log.episodes) ids.insert(e.dm_id);
  return static_cast<int>(ids.size());
}

// floor(x) plus a Bernoulli(frac(x)) bump; the draw is only consumed when
// there is a fractional part, so integer s_r never touches the stream.
int rounded_count(double x, Rng& rng) {
  double fl = std::floor(x);
  double frac = x - fl;
  int n = static_cast<int>(fl);
  if (frac > 0 && rng.uniform01() < frac) ++n;
  return n;
}

std::vector<EpisodeTensor> make_sim_block(int n_dms, const SimPersonaConfig& persona,
                                          const std::vector<EnumeratedStrategy>& strategy_space,
                                          const Corpus& corpus, std::uint64_t sim_seed) {
  PersonaSampler sampler = default_persona_law(derive_seed(sim_seed, {kStreamScorer}),
                                               persona.eta, persona.epsilon, persona.mask);
  SimulateOptions options;
  options.episode = persona.episode;
  options.strategies_per_dm = persona.strategies_per_dm;
  options.threads = persona.threads;
  InteractionLog log = simulate_dataset(n_dms, sampler, strategy_space, corpus, sim_seed, options);
  return build_dataset(log, corpus);
}

}  // namespace

Model mixed_train(const PredictorConfig& config, const InteractionLog& base_log,
                  const MixSchedule& schedule, const SimPersonaConfig& persona,
                  const std::vector<EnumeratedStrategy>& strategy_space, const Corpus& corpus,
                  MixedTrainReport* report) {
  if (schedule.s_r < 0) throw TrainingError("mixed_train: s_r must be nonnegative");
  if (base_log.episodes.empty() && schedule.s_r <= 0) {
    throw TrainingError("mixed_train: empty base log and no simulation");
  }
  // An empty base log still trains on s_r "units" of simulation.
  const int n_base = std::max(1, count_dms(base_log));
  std::vector<EpisodeTensor> base = build_dataset(base_log, corpus);

  if (config.kind == PredictorKind::Majority) {
    // No gradient epochs: one simulated block (the epoch-0 draw) is merged
    // with the base rows and counted once.
    std::vector<EpisodeTensor> data = base;
    if (schedule.s_r > 0) {
      std::uint64_t sim_seed = derive_seed(config.seed, {kStreamSimEpoch, 0});
      Rng round_rng(derive_seed(config.seed, {kStreamSimEpoch, 0, 1}));
      int n_sim = rounded_count(schedule.s_r * n_base, round_rng);
      if (n_sim > 0) {
        auto sim = make_sim_block(n_sim, persona, strategy_space, corpus, sim_seed);
        data.insert(data.end(), sim.begin(), sim.end());
        if (report) report->sim_dm_count.push_back(n_sim);
      }
    }
    Model model;
    model.config = config;
    model.majority = majority_train(data);
    return model;
  }

  Model model = init_model(config);
  AdamOptimizer adam;
  adam.lr = config.learning_rate;

  // Fixed-pool mode reuses the epoch-0 block every epoch.
  std::vector<EpisodeTensor> pool;
  int pool_dms = 0;
  if (schedule.s_r > 0 && !schedule.regenerate_per_epoch) {
    Rng round_rng(derive_seed(config.seed, {kStreamSimEpoch, 0, 1}));
    pool_dms = rounded_count(schedule.s_r * n_base, round_rng);
    if (pool_dms > 0) {
      pool = make_sim_block(pool_dms, persona, strategy_space, corpus,
                            derive_seed(config.seed, {kStreamSimEpoch, 0}));
    }
  }

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::uint64_t e = static_cast<std::uint64_t>(epoch);
    double sim_loss = 0.0;
    int sim_dms = 0;
    if (schedule.s_r > 0) {
      std::vector<EpisodeTensor> block;
      const std::vector<EpisodeTensor>* sim = nullptr;
      if (schedule.regenerate_per_epoch) {
        Rng round_rng(derive_seed(config.seed, {kStreamSimEpoch, e, 1}));
        sim_dms = rounded_count(schedule.s_r * n_base, round_rng);
        if (sim_dms > 0) {
          block = make_sim_block(sim_dms, persona, strategy_space, corpus,
                                 derive_seed(config.seed, {kStreamSimEpoch, e}));
          sim = &block;
        }
      } else if (pool_dms > 0) {
        sim_dms = pool_dms;
        sim = &pool;
      }
      if (sim) {
        sim_loss =
            train_epoch(model, adam, *sim, derive_seed(config.seed, {kStreamSimEpoch, e, 2}));
      }
    }
    double base_loss = 0.0;
    if (!base.empty()) {
      base_loss = train_epoch(model, adam, base, derive_seed(config.seed, {kStreamEpoch, e}));
    }
    if (report) {
      report->sim_dm_count.push_back(sim_dms);
      report->sim_loss.push_back(sim_loss);
      report->base_loss.push_back(base_loss);
    }
  }
  return model;
}

std::vector<Model> mixed_train_ensemble(const PredictorConfig& config,
                                        const InteractionLog& base_log,
                                        const MixSchedule& schedule,
                                        const SimPersonaConfig& persona,
                                        const std::vector<EnumeratedStrategy>& strategy_space,
                                        const Corpus& corpus, int threads) {
  std::vector<Model> members(kEnsembleSize);
  auto run = [&](int i) {
    PredictorConfig c = config;
    c.seed = static_cast<std::uint64_t>(i + 1);
    members[i] = mixed_train(c, base_log, schedule, persona, strategy_space, corpus);
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < kEnsembleSize; ++i) run(i);
  } else {
    std::vector<std::thread> pool_threads;
    for (int w = 0; w < threads; ++w) {
      pool_threads.emplace_back([&, w] {
        for (int i = w; i < kEnsembleSize; i += threads) run(i);
      });
    }
    for (auto& t : pool_threads) t.join();
  }
  return members;
}

std::string training_curve_csv(const MixedTrainReport& report) {
  std::ostringstream out;
  out << "epoch,sim_dms,sim_loss,base_loss,val_accuracy\n";
  for (std::size_t e = 0; e < report.base_loss.size(); ++e) {
    out << e << ',' << (e < report.sim_dm_count.size() ? report.sim_dm_count[e] : 0) << ','
        << (e < report.sim_loss.size() ? report.sim_loss[e] : 0.0) << ','
        << report.base_loss[e] << ',';
    if (e < report.val_accuracy.size()) out << report.val_accuracy[e];
    out << "\n";
  }
  return out.str();
}

}  // namespace persuasion
