#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "persuasion/features.hpp"
#include "persuasion/log.hpp"
#include "persuasion/rng.hpp"

namespace persuasion {

enum class PredictorKind : std::uint8_t { Majority = 0, FeedForward = 1, Lstm = 2 };
const char* to_string(PredictorKind k);
PredictorKind predictor_kind_from_name(const std::string& name);

struct PredictorConfig {
  PredictorKind kind = PredictorKind::Lstm;
  int hidden_size = 32;
  int n_layers = 2;
  double learning_rate = 1e-3;
  int epochs = 10;
  std::uint64_t seed = 1;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- Majority

// Per-review Go-rate over the training rows; unseen reviews fall back to
// the global Go-rate. Human rows with a reaction under 3 seconds are
// excluded; simulated rows are always counted.
struct MajorityModel {
  std::unordered_map<int, std::pair<int, int>> counts;  // review -> (go, total)
  double global_go_rate = 0.5;

  double predict(int review_index) const;
};

MajorityModel majority_train(const std::vector<EpisodeTensor>& dataset);

// --------------------------------------------------- gradient-based models

// Fully connected net: n_layers hidden ReLU layers then a sigmoid head.
// Parameters live in one flat vector (layout in predictors.cpp); gradients
// are exact analytic derivatives of the summed binary cross-entropy.
struct MlpParams {
  int input = kFeatureCount;
  int hidden = 64;
  int layers = 2;
  std::vector<double> w;

  static MlpParams init(int input, int hidden, int layers, std::uint64_t seed);
  static std::size_t param_count(int input, int hidden, int layers);
  double forward(const double* x) const;
  // Adds the gradient of the summed BCE over the batch into grad (sized
  // like w); returns the summed loss.
  double loss_grad(const std::vector<const double*>& xs, const std::vector<std::uint8_t>& ys,
                   std::vector<double>& grad) const;
};

// Stacked LSTM over one episode. At the episode's first round the cell
// state of each layer starts from a learned parameter and the hidden state
// from zero; both then flow across game boundaries within the episode.
struct LstmParams {
  int input = kFeatureCount;
  int hidden = 32;
  int layers = 2;
  std::vector<double> w;

  static LstmParams init(int input, int hidden, int layers, std::uint64_t seed);
  static std::size_t param_count(int input, int hidden, int layers);
  std::vector<double> forward_episode(const EpisodeTensor& episode) const;
  // Summed BCE over the episode's rounds; exact gradients including the
  // learned initial cell.
  double loss_grad_episode(const EpisodeTensor& episode, std::vector<double>& grad) const;
};

// ------------------------------------------------------------------ model

struct Model {
  PredictorConfig config;
  MajorityModel majority;       // kind == Majority
  std::vector<double> params;   // gradient-based kinds
  std::uint64_t corpus_hash = 0;
  std::uint64_t run_config_hash = 0;

  // P(Go) per round of the episode.
  std::vector<double> predict_episode(const EpisodeTensor& episode) const;
};

struct AdamOptimizer {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m, v;
  long step_count = 0;

  void step(std::vector<double>& params, const std::vector<double>& grad);
};

Model init_model(const PredictorConfig& config);

// One shuffled pass over the dataset (minibatches of rounds for the FC
// net, one optimizer step per episode for the LSTM). Returns the mean
// per-round loss; throws TrainingError on non-finite loss.
double train_epoch(Model& model, AdamOptimizer& adam, const std::vector<EpisodeTensor>& data,
                   std::uint64_t shuffle_seed);

struct TrainReport {
  std::vector<double> epoch_loss;
};

// Plain training: config.epochs passes with epoch-derived shuffle seeds.
// Fully determined by (config, dataset bytes).
Model train(const PredictorConfig& config, const std::vector<EpisodeTensor>& dataset,
            TrainReport* report = nullptr);

inline constexpr int kEnsembleSize = 15;

// 15 variants differing only in seed (1..15). Members may train in
// parallel; each is individually deterministic.
std::vector<Model> train_ensemble(const PredictorConfig& config,
                                  const std::vector<EpisodeTensor>& dataset, int threads = 1);

// Versioned little-endian binary checkpoint.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace persuasion
