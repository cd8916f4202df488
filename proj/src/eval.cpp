#include "persuasion/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace persuasion {

EpisodePredictions predict_all(const Model& model, const std::vector<EpisodeTensor>& data) {
  EpisodePredictions out;
  out.reserve(data.size());
  for (const EpisodeTensor& e : data) out.push_back(model.predict_episode(e));
  return out;
}

EpisodePredictions ensemble_mean_predictions(const std::vector<Model>& ensemble,
                                             const std::vector<EpisodeTensor>& data) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  EpisodePredictions mean = predict_all(ensemble[0], data);
  for (std::size_t m = 1; m < ensemble.size(); ++m) {
    EpisodePredictions p = predict_all(ensemble[m], data);
    for (std::size_t e = 0; e < p.size(); ++e) {
      for (std::size_t r = 0; r < p[e].size(); ++r) mean[e][r] += p[e][r];
    }
  }
  for (auto& e : mean) {
    for (double& v : e) v /= static_cast<double>(ensemble.size());
  }
  return mean;
}

namespace {

// Per-(dm, strategy) correct/total counts, optionally restricted by a mask.
double grouped_accuracy(const EpisodePredictions& predictions,
                        const std::vector<EpisodeTensor>& data,
                        const std::vector<std::vector<std::uint8_t>>* mask,
                        std::uint8_t mask_value,
                        std::map<std::pair<std::string, std::string>, double>* group_out) {
  std::map<std::pair<std::string, std::string>, std::pair<long, long>> groups;
  if (predictions.size() != data.size()) {
    throw std::invalid_argument("predictions and data are not aligned");
  }
  for (std::size_t e = 0; e < data.size(); ++e) {
    if (predictions[e].size() != data[e].labels.size()) {
      throw std::invalid_argument("prediction row count mismatch");
    }
    auto& g = groups[{data[e].dm_id, data[e].strategy_id}];
    for (std::size_t r = 0; r < predictions[e].size(); ++r) {
      if (mask && (*mask)[e][r] != mask_value) continue;
      Decision d = threshold_decision(predictions[e][r]);
      bool correct = (d == Decision::Go) == (data[e].labels[r] != 0);
      g.first += correct;
      g.second += 1;
    }
  }
  double sum = 0.0;
  long n_groups = 0;
  for (const auto& [key, counts] : groups) {
    if (counts.second == 0) continue;  // group has no rounds on this side
    double acc = static_cast<double>(counts.first) / counts.second;
    if (group_out) (*group_out)[key] = acc;
    sum += acc;
    ++n_groups;
  }
  if (n_groups == 0) throw std::invalid_argument("accuracy over an empty group set");
  return sum / n_groups;
}

}  // namespace

double accuracy(const EpisodePredictions& predictions, const std::vector<EpisodeTensor>& data) {
  return grouped_accuracy(predictions, data, nullptr, 0, nullptr);
}

HardEasyPartition hard_easy_partition(const std::vector<Model>& ensemble,
                                      const std::vector<EpisodeTensor>& data) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  HardEasyPartition part;
  part.hard.resize(data.size());
  if (ensemble[0].config.kind == PredictorKind::Majority) {
    EpisodePredictions p = predict_all(ensemble[0], data);
    for (std::size_t e = 0; e < data.size(); ++e) {
      part.hard[e].resize(p[e].size());
      for (std::size_t r = 0; r < p[e].size(); ++r) {
        bool hard = p[e][r] >= 0.40 && p[e][r] <= 0.60;
        part.hard[e][r] = hard;
        (hard ? part.hard_count : part.easy_count)++;
      }
    }
    return part;
  }
  std::vector<EpisodePredictions> all;
  all.reserve(ensemble.size());
  for (const Model& m : ensemble) all.push_back(predict_all(m, data));
  for (std::size_t e = 0; e < data.size(); ++e) {
    part.hard[e].resize(data[e].labels.size());
    for (std::size_t r = 0; r < data[e].labels.size(); ++r) {
      int go = 0;
      for (const auto& p : all) go += threshold_decision(p[e][r]) == Decision::Go;
      bool hard = go != 0 && go != static_cast<int>(ensemble.size());
      part.hard[e][r] = hard;
      (hard ? part.hard_count : part.easy_count)++;
    }
  }
  return part;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& member_accuracies,
                                       int n_resamples, std::uint64_t seed) {
  const std::size_t n = member_accuracies.size();
  if (n < 2) throw std::invalid_argument("bootstrap_ci needs at least two values");
  Rng rng(seed);
  std::vector<double> means(n_resamples);
  for (int r = 0; r < n_resamples; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += member_accuracies[rng.below(n)];
    means[r] = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    double pos = q * (means.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, means.size() - 1);
    double frac = pos - lo;
    return means[lo] * (1.0 - frac) + means[hi] * frac;
  };
  return {quantile(0.025), quantile(0.975)};
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["overall_accuracy"] = overall_accuracy;
  j["member_accuracies"] = member_accuracies;
  j["ci_lo"] = ci_lo;
  j["ci_hi"] = ci_hi;
  j["hard_count"] = hard_count;
  j["easy_count"] = easy_count;
  j["hard_accuracy"] = hard_accuracy;
  j["easy_accuracy"] = easy_accuracy;
  j["per_strategy"] = per_strategy;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hash;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::string EvalReport::per_strategy_csv() const {
  std::ostringstream out;
  char hash[40];
  std::snprintf(hash, sizeof hash, "# config_hash=%016llx\n",
                static_cast<unsigned long long>(config_hash));
  out << hash << "strategy_id,accuracy\n";
  for (const auto& [sid, acc] : per_strategy) out << sid << ',' << acc << "\n";
  return out.str();
}

EvalReport ope_evaluate(const std::vector<Model>& ensemble, const InteractionLog& train_log,
                        const InteractionLog& test_log, const Corpus& corpus,
                        std::uint64_t seed) {
  auto check_disjoint = [](std::vector<std::string> a, std::vector<std::string> b,
                           const char* what) {
    std::set<std::string> sa(a.begin(), a.end());
    for (const std::string& id : b) {
      if (sa.count(id)) {
        throw std::invalid_argument(std::string("train/test ") + what + " sets overlap on " + id);
      }
    }
  };
  check_disjoint(train_log.dm_ids(), test_log.dm_ids(), "dm");
  check_disjoint(train_log.strategy_ids(), test_log.strategy_ids(), "strategy");

  std::vector<EpisodeTensor> test = build_dataset(test_log, corpus);
  EvalReport report;
  report.seed = seed;
  for (const Model& m : ensemble) {
    report.member_accuracies.push_back(accuracy(predict_all(m, test), test));
    report.config_hash = m.run_config_hash;
  }
  report.overall_accuracy =
      std::accumulate(report.member_accuracies.begin(), report.member_accuracies.end(), 0.0) /
      static_cast<double>(report.member_accuracies.size());
  if (report.member_accuracies.size() >= 2) {
    std::tie(report.ci_lo, report.ci_hi) =
        bootstrap_ci(report.member_accuracies, 10000, derive_seed(seed, {kStreamEval, 1}));
  } else {
    report.ci_lo = report.ci_hi = report.overall_accuracy;
  }

  EpisodePredictions vote = ensemble_mean_predictions(ensemble, test);
  std::map<std::pair<std::string, std::string>, double> groups;
  grouped_accuracy(vote, test, nullptr, 0, &groups);
  std::map<std::string, std::pair<double, int>> by_strategy;
  for (const auto& [key, acc] : groups) {
    auto& s = by_strategy[key.second];
    s.first += acc;
    s.second += 1;
  }
  for (const auto& [sid, s] : by_strategy) report.per_strategy[sid] = s.first / s.second;

  HardEasyPartition part = hard_easy_partition(ensemble, test);
  report.hard_count = part.hard_count;
  report.easy_count = part.easy_count;
  if (part.hard_count > 0) {
    report.hard_accuracy = grouped_accuracy(vote, test, &part.hard, 1, nullptr);
  }
  if (part.easy_count > 0) {
    report.easy_accuracy = grouped_accuracy(vote, test, &part.hard, 0, nullptr);
  }
  return report;
}

double loo_on_policy(const PredictorConfig& config, const InteractionLog& log,
                     const Corpus& corpus, std::uint64_t seed) {
  std::vector<std::string> dms = log.dm_ids();
  std::sort(dms.begin(), dms.end());
  if (dms.size() < 2) throw std::invalid_argument("loo_on_policy needs at least two DMs");

  std::vector<EpisodeTensor> all = build_dataset(log, corpus);
  EpisodePredictions held_out_preds;
  std::vector<EpisodeTensor> held_out;
  for (std::size_t fold = 0; fold < dms.size(); ++fold) {
    std::vector<EpisodeTensor> train_set;
    std::vector<const EpisodeTensor*> test_set;
    for (const EpisodeTensor& e : all) {
      if (e.dm_id == dms[fold]) {
        test_set.push_back(&e);
      } else {
        train_set.push_back(e);
      }
    }
    PredictorConfig c = config;
    c.seed = derive_seed(seed, {kStreamEval, fold});
    Model model = train(c, train_set);
    for (const EpisodeTensor* e : test_set) {
      held_out.push_back(*e);
      held_out_preds.push_back(model.predict_episode(*e));
    }
  }
  return accuracy(held_out_preds, held_out);
}

// ----------------------------------------------------------- correlations

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson needs two equal-length vectors of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double mean_rank = (i + j) / 2.0 + 1.0;  // ties share the average rank
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

// Regularized incomplete beta via the Lentz continued fraction.
double betacf(double a, double b, double x) {
  const double eps = 3e-14, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double betai(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

double spearman_p_value(double rho, int n) {
  if (n < 3) return 1.0;
  if (std::fabs(rho) >= 1.0) return 0.0;
  double df = n - 2;
  double t = rho * std::sqrt(df / (1.0 - rho * rho));
  return betai(df / 2.0, 0.5, df / (df + t * t));
}

CorrelationReport correlation_report(const InteractionLog& log_a, const InteractionLog& log_b,
                                     int min_count) {
  struct Counts {
    long go = 0, total = 0;
  };
  auto review_rates = [](const InteractionLog& log) {
    std::map<long, Counts> m;
    for (const Episode& e : log.episodes) {
      for (const GameRecord& g : e.games) {
        for (const RoundRecord& r : g.rounds) {
          auto& c = m[static_cast<long>(r.hotel) * 8 + r.review_slot];
          c.go += r.decision == Decision::Go;
          c.total += 1;
        }
      }
    }
    return m;
  };
  auto history_rates = [](const InteractionLog& log) {
    std::map<long, Counts> m;
    for (const Episode& e : log.episodes) {
      for (const GameRecord& g : e.games) {
        for (std::size_t t = 2; t < g.rounds.size(); ++t) {
          const RoundRecord& p2 = g.rounds[t - 2];
          const RoundRecord& p1 = g.rounds[t - 1];
          long key = (p2.decision == Decision::Go ? 8 : 0) + (p2.payoff ? 4 : 0) +
                     (p1.decision == Decision::Go ? 2 : 0) + (p1.payoff ? 1 : 0);
          auto& c = m[key];
          c.go += g.rounds[t].decision == Decision::Go;
          c.total += 1;
        }
      }
    }
    return m;
  };
  auto align = [&](const std::map<long, Counts>& a, const std::map<long, Counts>& b,
                   std::vector<double>& va, std::vector<double>& vb) {
    for (const auto& [key, ca] : a) {
      auto it = b.find(key);
      if (it == b.end()) continue;
      if (ca.total < min_count || it->second.total < min_count) continue;
      va.push_back(static_cast<double>(ca.go) / ca.total);
      vb.push_back(static_cast<double>(it->second.go) / it->second.total);
    }
  };

  CorrelationReport report;
  std::vector<double> ra, rb;
  align(review_rates(log_a), review_rates(log_b), ra, rb);
  if (ra.size() < 3) throw std::invalid_argument("fewer than 3 aligned review buckets");
  report.review_buckets = static_cast<int>(ra.size());
  report.review_vector_r = pearson(ra, rb);

  std::vector<double> ha, hb;
  align(history_rates(log_a), history_rates(log_b), ha, hb);
  if (ha.size() < 3) throw std::invalid_argument("fewer than 3 aligned history buckets");
  report.history_buckets = static_cast<int>(ha.size());
  report.history_vector_r = pearson(ha, hb);
  return report;
}

// -------------------------------------------------------------- learning

std::vector<ImprovementPoint> improvement_curve(const InteractionLog& log) {
  std::map<int, std::pair<long, long>> buckets;  // index -> (payoff, rounds)
  std::map<int, int> games_at;
  for (const Episode& e : log.episodes) {
    if (!e.defeated_expert()) continue;
    const int n_games = static_cast<int>(e.games.size());
    for (int g = 0; g < n_games; ++g) {
      int back = n_games - 1 - g;
      auto& b = buckets[back];
      for (const RoundRecord& r : e.games[g].rounds) {
        b.first += r.payoff;
        b.second += 1;
      }
      games_at[back] += 1;
    }
  }
  std::vector<ImprovementPoint> curve;
  for (const auto& [back, b] : buckets) {
    if (b.second == 0) continue;
    curve.push_back({back, static_cast<double>(b.first) / b.second, games_at[back]});
  }
  return curve;
}

std::string improvement_curve_csv(const std::vector<ImprovementPoint>& curve) {
  std::ostringstream out;
  out << "games_before_defeat,mean_win_rate,n_games\n";
  for (const ImprovementPoint& p : curve) {
    out << p.games_before_defeat << ',' << p.mean_win_rate << ',' << p.n_games << "\n";
  }
  return out.str();
}

double improvement_ratio(double acc_nn, double acc_n0, double acc_2n0) {
  double den = acc_2n0 - acc_n0;
  if (den == 0.0) throw std::invalid_argument("improvement_ratio: zero denominator");
  return (acc_nn - acc_n0) / den;
}

// ------------------------------------------------- pseudo-human protocol

PseudoHumanData make_pseudo_human_data(const Corpus& corpus,
                                       const std::vector<EnumeratedStrategy>& space,
                                       const OpeProtocol& protocol) {
  BuiltinSets sets = builtin_sets(space);
  std::set<std::string> test_ids;
  for (const EnumeratedStrategy& s : sets.set_b) test_ids.insert(s.id);
  std::vector<EnumeratedStrategy> train_space;
  for (const EnumeratedStrategy& s : space) {
    if (!test_ids.count(s.id)) train_space.push_back(s);
  }

  SimulateOptions options;
  options.episode = protocol.episode;
  options.strategies_per_dm = 6;
  options.threads = protocol.threads;

  PseudoHumanData data;
  data.train_log = simulate_dataset(
      protocol.train_dms, default_persona_law(derive_seed(protocol.seed, {kStreamScorer, 1})),
      train_space, corpus, derive_seed(protocol.seed, {kStreamEval, 1}), options);
  data.test_log = simulate_dataset(
      protocol.test_dms, perturbed_persona_law(derive_seed(protocol.seed, {kStreamScorer, 2})),
      sets.set_b, corpus, derive_seed(protocol.seed, {kStreamEval, 2}), options);
  return data;
}

// ------------------------------------------------------------- ablations

std::vector<AblationRow> ablation_sweep(AblationAxis axis, const std::vector<double>& grid,
                                        const PredictorConfig& config,
                                        const MixSchedule& schedule,
                                        const SimPersonaConfig& persona,
                                        const PseudoHumanData& data,
                                        const std::vector<EnumeratedStrategy>& space,
                                        const Corpus& corpus, std::uint64_t seed, int threads) {
  struct Point {
    std::string label;
    double value;
    MixSchedule schedule;
    SimPersonaConfig persona;
  };
  std::vector<Point> points;
  if (axis == AblationAxis::HeuristicSubsets) {
    for (int bits = 0; bits < 8; ++bits) {
      Point p{"", static_cast<double>(bits), schedule, persona};
      p.persona.mask.trustful = bits & 1;
      p.persona.mask.language = bits & 2;
      p.persona.mask.random = bits & 4;
      std::string label;
      if (p.persona.mask.trustful) label += "T";
      if (p.persona.mask.language) label += "L";
      if (p.persona.mask.random) label += "R";
      p.label = label.empty() ? "oracle-only" : label;
      points.push_back(std::move(p));
    }
  } else {
    for (double v : grid) {
      Point p{"", v, schedule, persona};
      if (axis == AblationAxis::Eta) {
        p.persona.eta = v;
        p.label = "eta=" + std::to_string(v);
      } else {
        p.schedule.s_r = v;
        p.label = "s_r=" + std::to_string(v);
      }
      points.push_back(std::move(p));
    }
  }

  std::vector<AblationRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    std::vector<Model> members = mixed_train_ensemble(config, data.train_log, p.schedule,
                                                      p.persona, space, corpus, threads);
    EvalReport report = ope_evaluate(members, data.train_log, data.test_log, corpus,
                                     derive_seed(seed, {kStreamEval, 3, i}));
    rows.push_back({p.label, p.value, report.overall_accuracy, report.ci_lo, report.ci_hi, 1.0});
  }
  if (axis == AblationAxis::HeuristicSubsets) {
    double full = rows.back().accuracy;  // bits == 7: every heuristic on
    if (full != 0.0) {
      for (AblationRow& r : rows) r.relative_to_full = r.accuracy / full;
    }
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows, std::uint64_t config_hash) {
  std::ostringstream out;
  char hash[40];
  std::snprintf(hash, sizeof hash, "# config_hash=%016llx\n",
                static_cast<unsigned long long>(config_hash));
  out << hash << "label,value,accuracy,ci_lo,ci_hi,relative_to_full\n";
  for (const AblationRow& r : rows) {
    out << r.label << ',' << r.value << ',' << r.accuracy << ',' << r.ci_lo << ',' << r.ci_hi
        << ',' << r.relative_to_full << "\n";
  }
  return out.str();
}

}  // namespace persuasion
