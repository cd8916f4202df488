#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/predictors.hpp"
#include "persuasion/trainer.hpp"

namespace persuasion {

// One probability vector per episode, aligned with the tensor list.
using EpisodePredictions = std::vector<std::vector<double>>;

EpisodePredictions predict_all(const Model& model, const std::vector<EpisodeTensor>& data);

// Mean probability across members, per round.
EpisodePredictions ensemble_mean_predictions(const std::vector<Model>& ensemble,
                                             const std::vector<EpisodeTensor>& data);

// Probability >= 0.5 reads as Go (ties resolve to Go).
inline Decision threshold_decision(double p) { return p >= 0.5 ? Decision::Go : Decision::Stay; }

// Rounds are grouped by (dm_id, strategy_id); the result is the unweighted
// mean of the per-group accuracies. Throws on an empty group set.
double accuracy(const EpisodePredictions& predictions, const std::vector<EpisodeTensor>& data);

struct HardEasyPartition {
  std::vector<std::vector<std::uint8_t>> hard;  // aligned with the tensors; 1 = hard
  int hard_count = 0;
  int easy_count = 0;
};

// A round is hard when the ensemble members' thresholded decisions are not
// unanimous; for a Majority model, when its confidence lies in [0.40, 0.60].
HardEasyPartition hard_easy_partition(const std::vector<Model>& ensemble,
                                      const std::vector<EpisodeTensor>& data);

// Percentile bootstrap (2.5/97.5) over resamples-with-replacement of the
// member accuracies. Deterministic given the seed.
std::pair<double, double> bootstrap_ci(const std::vector<double>& member_accuracies,
                                       int n_resamples = 10000, std::uint64_t seed = 1);

struct EvalReport {
  double overall_accuracy = 0.0;                 // mean of member accuracies
  std::vector<double> member_accuracies;
  double ci_lo = 0.0, ci_hi = 0.0;               // bootstrap over members
  std::map<std::string, double> per_strategy;    // ensemble-vote accuracy per strategy
  int hard_count = 0, easy_count = 0;
  double hard_accuracy = 0.0, easy_accuracy = 0.0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
  std::string per_strategy_csv() const;
};

// Full off-policy report. Rejects overlapping DM or strategy id sets
// between the train and test logs.
EvalReport ope_evaluate(const std::vector<Model>& ensemble, const InteractionLog& train_log,
                        const InteractionLog& test_log, const Corpus& corpus,
                        std::uint64_t seed);

// Leave-one-DM-out: train on all other DMs, predict the held-out one;
// aggregate with the grouped accuracy metric. Needs at least two DMs.
double loo_on_policy(const PredictorConfig& config, const InteractionLog& log,
                     const Corpus& corpus, std::uint64_t seed);

struct CorrelationReport {
  double review_vector_r = 0.0;   // per-review Go-rates across the two logs
  double history_vector_r = 0.0;  // Go-rates per 2-round (decision, payoff) history
  int review_buckets = 0;
  int history_buckets = 0;
};

// Aligns per-review and per-history-bucket Go-rates of the two logs
// (buckets with >= min_count observations in both) and reports Pearson
// coefficients. History buckets are the 16 (d_{t-2}, payoff_{t-2}, d_{t-1},
// payoff_{t-1}) states within a game, rounds 3..10 only.
CorrelationReport correlation_report(const InteractionLog& log_a, const InteractionLog& log_b,
                                     int min_count = 5);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);
// Two-sided p-value for a Spearman coefficient via the t approximation.
double spearman_p_value(double rho, int n);

struct ImprovementPoint {
  int games_before_defeat = 0;  // 0 = the defeating game itself
  double mean_win_rate = 0.0;   // mean per-round payoff at this index
  int n_games = 0;
};

// Winning rate as a function of distance from the defeating game, pooled
// over every episode that recorded a defeat.
std::vector<ImprovementPoint> improvement_curve(const InteractionLog& log);

std::string improvement_curve_csv(const std::vector<ImprovementPoint>& curve);

// (acc_nn - acc_n0) / (acc_2n0 - acc_n0); throws on a zero denominator.
double improvement_ratio(double acc_nn, double acc_n0, double acc_2n0);

// ------------------------------------------------- pseudo-human protocol

// Desk-scale stand-in for a held-out human test set: training data comes
// from default-law personas playing uniformly random strategies (excluding
// the held-out test set), test data from perturbed personas playing the
// builtin test strategies with a distinct scorer seed.
struct OpeProtocol {
  int train_dms = 50;
  int test_dms = 20;
  std::uint64_t seed = 1;
  EpisodeOptions episode;
  int threads = 1;
};

struct PseudoHumanData {
  InteractionLog train_log;
  InteractionLog test_log;
};

PseudoHumanData make_pseudo_human_data(const Corpus& corpus,
                                       const std::vector<EnumeratedStrategy>& space,
                                       const OpeProtocol& protocol);

// ------------------------------------------------------------- ablations

enum class AblationAxis : std::uint8_t { Eta, SR, HeuristicSubsets };

struct AblationRow {
  std::string label;
  double value = 0.0;  // grid value; subset index for heuristic rows
  double accuracy = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double relative_to_full = 1.0;  // heuristic axis: accuracy / all-on accuracy
};

// One full mixed-train + OPE evaluation per grid point. For the heuristic
// axis the grid is ignored and the 8 on/off subsets of {language, trustful,
// random} are swept (all-off = oracle-only nature).
std::vector<AblationRow> ablation_sweep(AblationAxis axis, const std::vector<double>& grid,
                                        const PredictorConfig& config,
                                        const MixSchedule& schedule,
                                        const SimPersonaConfig& persona,
                                        const PseudoHumanData& data,
                                        const std::vector<EnumeratedStrategy>& space,
                                        const Corpus& corpus, std::uint64_t seed,
                                        int threads = 1);

std::string ablation_csv(const std::vector<AblationRow>& rows, std::uint64_t config_hash);

}  // namespace persuasion
