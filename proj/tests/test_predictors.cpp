#include "doctest.h"
#include "persuasion/predictors.hpp"
#include "persuasion/sim.hpp"
#include "persuasion/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

using namespace persuasion;

namespace {

EpisodeTensor random_episode(Rng& rng, int games, const std::string& dm = "d",
                             const std::string& strat = "s") {
  EpisodeTensor e;
  e.dm_id = dm;
  e.strategy_id = strat;
  for (int g = 0; g < games; ++g) {
    for (int r = 0; r < 10; ++r) {
      RoundFeatureVector v{};
      for (int i = 0; i < kFeatureCount; ++i) v[i] = rng.uniform(0.0, 1.0);
      e.rounds.push_back(v);
      e.labels.push_back(rng.below(2) ? 1 : 0);
      e.game_start.push_back(r == 0 ? 1 : 0);
      e.review_index.push_back(static_cast<int>(rng.below(100)));
      e.reaction_bins.push_back(0);
    }
  }
  return e;
}

// Central finite differences of a scalar loss in every parameter.
template <typename LossFn>
double max_relative_gradient_error(std::vector<double>& w, const std::vector<double>& analytic,
                                   LossFn loss) {
  // Step large enough that cancellation in (up - down) stays well below the
  // tolerance even for multi-round episode losses.
  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double keep = w[i];
    w[i] = keep + h;
    double up = loss();
    w[i] = keep - h;
    double down = loss();
    w[i] = keep;
    double numeric = (up - down) / (2 * h);
    double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-6});
    worst = std::max(worst, std::fabs(numeric - analytic[i]) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("majority baseline rates and fallback") {
  EpisodeTensor e;
  e.dm_id = "d";
  e.strategy_id = "s";
  e.simulated = true;
  for (int i = 0; i < 10; ++i) {
    e.rounds.push_back({});
    e.labels.push_back(i < 7 ? 1 : 0);
    e.game_start.push_back(i == 0 ? 1 : 0);
    e.review_index.push_back(5);  // one review seen ten times, 7 Go
    e.reaction_bins.push_back(0);
  }
  MajorityModel m = majority_train({e});
  CHECK(m.predict(5) == doctest::Approx(0.7));
  CHECK(m.predict(999) == doctest::Approx(0.7));  // global fallback equals 0.7 here

  // All-Stay set gives 0 everywhere.
  for (auto& l : e.labels) l = 0;
  MajorityModel z = majority_train({e});
  CHECK(z.predict(5) == 0.0);
  CHECK(z.global_go_rate == 0.0);
}

TEST_CASE("majority filters fast human rows but keeps simulated rows") {
  EpisodeTensor human;
  human.dm_id = "h";
  human.strategy_id = "s";
  human.simulated = false;
  for (int i = 0; i < 6; ++i) {
    human.rounds.push_back({});
    human.labels.push_back(1);
    human.game_start.push_back(i == 0 ? 1 : 0);
    human.review_index.push_back(1);
    // Bins 0..3 are under 3 seconds and must be ignored; 4..5 counted.
    human.reaction_bins.push_back(static_cast<std::uint8_t>(i));
  }
  human.labels[4] = 0;  // one counted Stay
  MajorityModel m = majority_train({human});
  CHECK(m.counts.at(1).second == 2);  // only bins 4 and 5 survive
  CHECK(m.predict(1) == doctest::Approx(0.5));

  // Row order invariance.
  EpisodeTensor reversed = human;
  std::reverse(reversed.labels.begin(), reversed.labels.end());
  std::reverse(reversed.reaction_bins.begin(), reversed.reaction_bins.end());
  MajorityModel m2 = majority_train({reversed});
  CHECK(m2.counts.at(1).second == 2);

  EpisodeTensor none = human;
  for (auto& b : none.reaction_bins) b = 0;
  CHECK_THROWS_AS(majority_train({none}), TrainingError);
}

TEST_CASE("zero-parameter networks output one half") {
  MlpParams mlp = MlpParams::init(kFeatureCount, 8, 2, 1);
  std::fill(mlp.w.begin(), mlp.w.end(), 0.0);
  RoundFeatureVector x{};
  x[0] = 1.0;
  x[40] = 3.0;
  CHECK(mlp.forward(x.data()) == doctest::Approx(0.5));

  LstmParams lstm = LstmParams::init(kFeatureCount, 4, 2, 1);
  std::fill(lstm.w.begin(), lstm.w.end(), 0.0);
  Rng rng(2);
  EpisodeTensor e = random_episode(rng, 2);
  for (double p : lstm.forward_episode(e)) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("feedforward gradients match finite differences") {
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    int hidden = 2 + static_cast<int>(rng.below(6));
    int layers = 1 + static_cast<int>(rng.below(3));
    MlpParams p = MlpParams::init(kFeatureCount, hidden, layers,
                                  derive_seed(100, {static_cast<std::uint64_t>(trial)}));
    std::vector<RoundFeatureVector> xs_storage(5);
    std::vector<const double*> xs;
    std::vector<std::uint8_t> ys;
    for (auto& x : xs_storage) {
      for (int i = 0; i < kFeatureCount; ++i) x[i] = rng.uniform(-1.0, 1.0);
      xs.push_back(x.data());
      ys.push_back(rng.below(2) ? 1 : 0);
    }
    std::vector<double> grad(p.w.size(), 0.0);
    p.loss_grad(xs, ys, grad);
    double err = max_relative_gradient_error(p.w, grad, [&] {
      std::vector<double> tmp(p.w.size(), 0.0);
      return p.loss_grad(xs, ys, tmp);
    });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("duplicated batch rows double the gradient exactly") {
  MlpParams p = MlpParams::init(kFeatureCount, 6, 2, 5);
  RoundFeatureVector x{};
  Rng rng(6);
  for (int i = 0; i < kFeatureCount; ++i) x[i] = rng.uniform(-1.0, 1.0);
  std::vector<double> g1(p.w.size(), 0.0), g2(p.w.size(), 0.0);
  p.loss_grad({x.data()}, {1}, g1);
  p.loss_grad({x.data(), x.data()}, {1, 1}, g2);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == doctest::Approx(2 * g1[i]));
}

TEST_CASE("lstm gradients match finite differences, including the initial cell") {
  Rng rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    int hidden = 2 + static_cast<int>(rng.below(3));
    int layers = 1 + static_cast<int>(rng.below(2));
    LstmParams p = LstmParams::init(kFeatureCount, hidden, layers,
                                    derive_seed(200, {static_cast<std::uint64_t>(trial)}));
    // Give the learned initial cell nonzero values so its gradient is live.
    for (double& w : p.w) w += rng.uniform(-0.05, 0.05);
    EpisodeTensor e = random_episode(rng, 2);
    std::vector<double> grad(p.w.size(), 0.0);
    p.loss_grad_episode(e, grad);
    double err = max_relative_gradient_error(p.w, grad, [&] {
      std::vector<double> tmp(p.w.size(), 0.0);
      return p.loss_grad_episode(e, tmp);
    });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("lstm episodes are independent of one another") {
  LstmParams p = LstmParams::init(kFeatureCount, 4, 2, 9);
  Rng rng(10);
  EpisodeTensor a = random_episode(rng, 1, "a");
  EpisodeTensor b = random_episode(rng, 2, "b");
  std::vector<double> alone = p.forward_episode(a);
  (void)p.forward_episode(b);
  std::vector<double> again = p.forward_episode(a);
  REQUIRE(alone.size() == again.size());
  for (std::size_t i = 0; i < alone.size(); ++i) CHECK(alone[i] == again[i]);
  for (double prob : alone) {
    CHECK(prob > 0.0);
    CHECK(prob < 1.0);
  }
}

TEST_CASE("training is deterministic and fits a separable toy set") {
  // Label = indicator of feature 0.
  std::vector<EpisodeTensor> data;
  Rng rng(20);
  for (int e = 0; e < 6; ++e) {
    EpisodeTensor ep = random_episode(rng, 1, "d" + std::to_string(e));
    for (std::size_t i = 0; i < ep.rounds.size(); ++i) {
      ep.rounds[i][0] = i % 2 == 0 ? 1.0 : -1.0;
      ep.labels[i] = i % 2 == 0 ? 1 : 0;
    }
    data.push_back(ep);
  }

  PredictorConfig config;
  config.kind = PredictorKind::FeedForward;
  config.hidden_size = 8;
  config.n_layers = 1;
  config.learning_rate = 1e-2;
  config.epochs = 60;
  config.seed = 3;

  TrainReport report;
  Model m1 = train(config, data, &report);
  Model m2 = train(config, data);
  CHECK(m1.params == m2.params);
  REQUIRE(report.epoch_loss.size() == 60);
  CHECK(report.epoch_loss.back() < report.epoch_loss.front());

  int correct = 0, total = 0;
  for (const EpisodeTensor& ep : data) {
    std::vector<double> probs = m1.predict_episode(ep);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      correct += (probs[i] >= 0.5) == (ep.labels[i] == 1);
      ++total;
    }
  }
  CHECK(static_cast<double>(correct) / total >= 0.99);
}

TEST_CASE("lstm training reduces the loss deterministically") {
  std::vector<EpisodeTensor> data;
  Rng rng(21);
  for (int e = 0; e < 4; ++e) {
    EpisodeTensor ep = random_episode(rng, 1, "d" + std::to_string(e));
    for (std::size_t i = 0; i < ep.rounds.size(); ++i) {
      ep.rounds[i][1] = i % 2 ? 1.0 : 0.0;
      ep.labels[i] = i % 2;
    }
    data.push_back(ep);
  }
  PredictorConfig config;
  config.kind = PredictorKind::Lstm;
  config.hidden_size = 6;
  config.n_layers = 2;
  config.learning_rate = 5e-3;
  config.epochs = 30;
  config.seed = 4;
  TrainReport report;
  Model m1 = train(config, data, &report);
  Model m2 = train(config, data);
  CHECK(m1.params == m2.params);
  CHECK(report.epoch_loss.back() < report.epoch_loss.front());
}

TEST_CASE("ensembles have 15 deterministic members") {
  std::vector<EpisodeTensor> data;
  Rng rng(22);
  for (int e = 0; e < 3; ++e) data.push_back(random_episode(rng, 1, "d" + std::to_string(e)));
  PredictorConfig config;
  config.kind = PredictorKind::FeedForward;
  config.hidden_size = 4;
  config.n_layers = 1;
  config.epochs = 2;

  std::vector<Model> serial = train_ensemble(config, data, 1);
  std::vector<Model> parallel = train_ensemble(config, data, 3);
  REQUIRE(serial.size() == kEnsembleSize);
  for (int i = 0; i < kEnsembleSize; ++i) {
    CHECK(serial[i].config.seed == static_cast<std::uint64_t>(i + 1));
    CHECK(serial[i].params == parallel[i].params);
  }

  // Ensemble mean prediction lies inside the member envelope.
  EpisodeTensor probe = random_episode(rng, 1, "p");
  double lo = 1.0, hi = 0.0, mean = 0.0;
  for (const Model& m : serial) {
    double p = m.predict_episode(probe)[0];
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    mean += p / kEnsembleSize;
  }
  CHECK(mean >= lo);
  CHECK(mean <= hi);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  std::vector<EpisodeTensor> data;
  Rng rng(23);
  data.push_back(random_episode(rng, 1));
  PredictorConfig config;
  config.kind = PredictorKind::Lstm;
  config.hidden_size = 4;
  config.n_layers = 2;
  config.epochs = 1;
  Model m = train(config, data);
  m.corpus_hash = 0x1234;
  m.run_config_hash = 0x5678;

  std::string path = "/tmp/persuasion_test_model.bin";
  save_model(m, path);
  Model back = load_model(path);
  CHECK(back.params == m.params);
  CHECK(back.config.hidden_size == 4);
  CHECK(back.config.kind == PredictorKind::Lstm);
  CHECK(back.corpus_hash == 0x1234);
  CHECK(back.run_config_hash == 0x5678);

  // Majority models serialize their count tables.
  EpisodeTensor e = data[0];
  e.simulated = true;
  PredictorConfig mc;
  mc.kind = PredictorKind::Majority;
  Model maj = train(mc, {e});
  save_model(maj, path);
  Model maj_back = load_model(path);
  CHECK(maj_back.majority.counts == maj.majority.counts);
  CHECK(maj_back.majority.global_go_rate == maj.majority.global_go_rate);

  std::remove(path.c_str());
  CHECK_THROWS(load_model(path));
}
