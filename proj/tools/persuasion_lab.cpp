// Command-line front end: every workflow (corpus generation, strategy
// enumeration, simulation, training, evaluation, ablations, analytics) as a
// subcommand with a reproducible flat key=value run configuration.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "persuasion/config.hpp"
#include "persuasion/corpus.hpp"
#include "persuasion/eval.hpp"
#include "persuasion/features.hpp"
#include "persuasion/log.hpp"
#include "persuasion/predictors.hpp"
#include "persuasion/sim.hpp"
#include "persuasion/strategy.hpp"
#include "persuasion/trainer.hpp"

namespace {

using namespace persuasion;

std::string hex_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
}

// Shared per-subcommand state: optional run-config file plus flag overrides.
struct CommonArgs {
  std::string run_config_path;
  RunConfig config;

  void load() {
    if (!run_config_path.empty()) config = RunConfig::from_file(run_config_path);
  }
  // Flags override file keys; only applied when the flag was given.
  void override_key(CLI::App* cmd, const std::string& flag, const std::string& key) {
    CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (opt && opt->count() > 0) config.set(key, opt->as<std::string>());
  }
};

void add_config_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--run-config", args.run_config_path,
                  "Flat key=value config file; flags override file keys");
  cmd->add_option("--threads", "Worker threads (results independent of the count)");
  cmd->add_option("--kind", "Predictor kind: majority | ff | lstm");
  cmd->add_option("--hidden", "Hidden size");
  cmd->add_option("--layers", "Layer count");
  cmd->add_option("--lr", "Learning rate");
  cmd->add_option("--epochs", "Training epochs");
  cmd->add_option("--s-r", "Simulated DMs per base DM injected each epoch");
  cmd->add_option("--eta", "Simulated-DM improvement rate");
  cmd->add_option("--epsilon", "Simulated-DM score-estimation noise std");
  cmd->add_option("--target", "Per-bot payoff target (8..10)");
  cmd->add_option("--cap", "Game cap per episode");
}

void apply_config_flags(CLI::App* cmd, CommonArgs& args) {
  args.load();
  args.override_key(cmd, "--threads", "threads");
  args.override_key(cmd, "--kind", "predictor.kind");
  args.override_key(cmd, "--hidden", "predictor.hidden");
  args.override_key(cmd, "--layers", "predictor.layers");
  args.override_key(cmd, "--lr", "predictor.lr");
  args.override_key(cmd, "--epochs", "predictor.epochs");
  args.override_key(cmd, "--s-r", "mix.s_r");
  args.override_key(cmd, "--eta", "persona.eta");
  args.override_key(cmd, "--epsilon", "persona.epsilon");
  args.override_key(cmd, "--target", "sim.target");
  args.override_key(cmd, "--cap", "sim.cap");
}

Corpus load_corpus(const std::string& path) { return ingest_corpus_csv(path); }

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 1;
  } catch (const IngestError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persuasion-game laboratory: simulation, training and evaluation"};
  app.require_subcommand(1);

  int exit_code = 0;
  auto defer = [&](std::function<void()> body) {
    // Runs after parsing; remembers the mapped exit code.
    return [&exit_code, body = std::move(body)] { exit_code = run_guarded(body); };
  };

  // ------------------------------------------------------------ gen-corpus
  {
    auto* cmd = app.add_subcommand("gen-corpus", "Generate the synthetic hotel/review corpus");
    auto seed = std::make_shared<std::uint64_t>(0);
    auto hotels = std::make_shared<int>(1068);
    auto out = std::make_shared<std::string>("corpus.csv");
    cmd->add_option("--seed", *seed, "Master seed")->required();
    cmd->add_option("--hotels", *hotels, "Number of hotels");
    cmd->add_option("--out", *out, "Output CSV path");
    cmd->callback(defer([=] {
      Corpus corpus = generate_corpus(*seed, *hotels);
      write_corpus_csv(corpus, *out);
      CorpusStats stats = corpus_stats(corpus);
      std::cout << "hotels=" << corpus.hotels.size() << " good_fraction=" << stats.good_fraction
                << " median_mean_score=" << stats.median_mean_score
                << " corpus_hash=" << hex_hash(corpus_hash(corpus)) << "\n";
    }));
  }

  // ------------------------------------------------------- enum-strategies
  {
    auto* cmd = app.add_subcommand("enum-strategies",
                                   "Enumerate the depth-<=2 expert strategy space");
    auto out = std::make_shared<std::string>("strategies.csv");
    auto sets_out = std::make_shared<std::string>();
    cmd->add_option("--out", *out, "Output CSV path");
    cmd->add_option("--sets-out", *sets_out, "Optional CSV with the builtin 6+6 sets");
    cmd->callback(defer([=] {
      std::vector<EnumeratedStrategy> all = enumerate_strategies();
      std::ostringstream csv;
      csv << "id,depth,class,signature,tree_json\n";
      int by_class[4] = {0, 0, 0, 0};
      for (const EnumeratedStrategy& s : all) {
        csv << s.id << ',' << s.depth << ',' << to_string(s.cls) << ','
            << signature_string(s.signature) << ",\"" << strategy_to_json(s.tree) << "\"\n";
        by_class[static_cast<int>(s.cls)]++;
      }
      write_text(*out, csv.str());
      std::cout << "strategies=" << all.size() << " simple=" << by_class[0]
                << " quality=" << by_class[1] << " history=" << by_class[2]
                << " complex=" << by_class[3] << "\n";
      if (!sets_out->empty()) {
        BuiltinSets sets = builtin_sets(all);
        std::ostringstream sc;
        sc << "set,id,class,signature\n";
        for (const EnumeratedStrategy& s : sets.set_a) {
          sc << "A," << s.id << ',' << to_string(s.cls) << ',' << signature_string(s.signature)
             << "\n";
        }
        for (const EnumeratedStrategy& s : sets.set_b) {
          sc << "B," << s.id << ',' << to_string(s.cls) << ',' << signature_string(s.signature)
             << "\n";
        }
        write_text(*sets_out, sc.str());
      }
    }));
  }

  // -------------------------------------------------------------- simulate
  {
    auto* cmd = app.add_subcommand("simulate", "Simulate DMs against random expert strategies");
    auto args = std::make_shared<CommonArgs>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto dms = std::make_shared<int>(50);
    auto corpus_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("log.csv");
    auto dm_prefix = std::make_shared<std::string>("sim");
    cmd->add_option("--seed", *seed, "Master seed")->required();
    cmd->add_option("--dms", *dms, "Number of simulated DMs");
    cmd->add_option("--corpus", *corpus_path, "Corpus CSV")->required();
    cmd->add_option("--out", *out, "Output interactions CSV");
    cmd->add_option("--dm-prefix", *dm_prefix, "DM id prefix (ids are <prefix>NNNNN)");
    add_config_flags(cmd, *args);
    cmd->callback(defer([=, cmd] {
      apply_config_flags(cmd, *args);
      Corpus corpus = load_corpus(*corpus_path);
      std::vector<EnumeratedStrategy> space = enumerate_strategies();
      SimPersonaConfig persona = args->config.sim_persona();
      SimulateOptions options;
      options.episode = persona.episode;
      options.strategies_per_dm = persona.strategies_per_dm;
      options.threads = persona.threads;
      PersonaSampler sampler =
          default_persona_law(derive_seed(*seed, {kStreamScorer}), persona.eta, persona.epsilon,
                              persona.mask, *dm_prefix);
      InteractionLog log = simulate_dataset(*dms, sampler, space, corpus, *seed, options);
      write_interactions_csv(log, corpus, *out,
                             {"config_hash=" + hex_hash(args->config.hash()),
                              "seed=" + std::to_string(*seed)});
      std::cout << "episodes=" << log.episodes.size() << " rounds=" << log.total_rounds()
                << "\n";
    }));
  }

  // ----------------------------------------------------------------- train
  {
    auto* cmd = app.add_subcommand("train", "Train a predictor (simulation-mixed when s_r > 0)");
    auto args = std::make_shared<CommonArgs>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto corpus_path = std::make_shared<std::string>();
    auto log_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("model.bin");
    auto ensemble_out = std::make_shared<std::string>();
    auto curve_out = std::make_shared<std::string>();
    cmd->add_option("--seed", *seed, "Master seed")->required();
    cmd->add_option("--corpus", *corpus_path, "Corpus CSV")->required();
    cmd->add_option("--log", *log_path, "Base interactions CSV")->required();
    cmd->add_option("--out", *out, "Checkpoint path (single model)");
    cmd->add_option("--ensemble-out", *ensemble_out,
                    "Prefix for the 15 seed-variant checkpoints (prefix.s01..s15)");
    cmd->add_option("--curve-out", *curve_out, "Training-curve CSV path");
    add_config_flags(cmd, *args);
    cmd->callback(defer([=, cmd] {
      apply_config_flags(cmd, *args);
      Corpus corpus = load_corpus(*corpus_path);
      InteractionLog base = ingest_interactions_csv(*log_path, corpus);
      std::vector<EnumeratedStrategy> space = enumerate_strategies();
      PredictorConfig pc = args->config.predictor();
      pc.seed = *seed;
      MixSchedule schedule = args->config.mix_schedule();
      SimPersonaConfig persona = args->config.sim_persona();
      std::uint64_t chash = corpus_hash(corpus);
      std::uint64_t cfg_hash = args->config.hash();
      if (!ensemble_out->empty()) {
        std::vector<Model> members =
            mixed_train_ensemble(pc, base, schedule, persona, space, corpus,
                                 static_cast<int>(args->config.get_int("threads", 1)));
        for (int i = 0; i < static_cast<int>(members.size()); ++i) {
          members[i].corpus_hash = chash;
          members[i].run_config_hash = cfg_hash;
          char suffix[8];
          std::snprintf(suffix, sizeof suffix, ".s%02d", i + 1);
          save_model(members[i], *ensemble_out + suffix);
        }
        std::cout << "ensemble_members=" << members.size()
                  << " config_hash=" << hex_hash(cfg_hash) << "\n";
      } else {
        MixedTrainReport report;
        Model model = mixed_train(pc, base, schedule, persona, space, corpus, &report);
        model.corpus_hash = chash;
        model.run_config_hash = cfg_hash;
        save_model(model, *out);
        if (!curve_out->empty()) write_text(*curve_out, training_curve_csv(report));
        std::cout << "model=" << *out << " config_hash=" << hex_hash(cfg_hash) << "\n";
      }
    }));
  }

  // -------------------------------------------------------------- evaluate
  {
    auto* cmd = app.add_subcommand("evaluate", "Off-policy evaluation of a trained ensemble");
    auto seed = std::make_shared<std::uint64_t>(0);
    auto corpus_path = std::make_shared<std::string>();
    auto train_log_path = std::make_shared<std::string>();
    auto test_log_path = std::make_shared<std::string>();
    auto models = std::make_shared<std::vector<std::string>>();
    auto report_out = std::make_shared<std::string>();
    auto strategy_out = std::make_shared<std::string>();
    cmd->add_option("--seed", *seed, "Bootstrap seed")->required();
    cmd->add_option("--corpus", *corpus_path, "Corpus CSV")->required();
    cmd->add_option("--train-log", *train_log_path, "Training interactions CSV")->required();
    cmd->add_option("--test-log", *test_log_path, "Test interactions CSV")->required();
    cmd->add_option("--model", *models, "Checkpoint path(s); repeat for an ensemble")
        ->required();
    cmd->add_option("--report-out", *report_out, "Report JSON path (default: stdout)");
    cmd->add_option("--per-strategy-out", *strategy_out, "Per-strategy accuracy CSV");
    cmd->callback(defer([=] {
      Corpus corpus = load_corpus(*corpus_path);
      std::uint64_t chash = corpus_hash(corpus);
      std::vector<Model> ensemble;
      for (const std::string& path : *models) {
        Model m = load_model(path);
        if (m.corpus_hash != 0 && m.corpus_hash != chash) {
          throw std::invalid_argument(path + ": model was trained on a different corpus (hash " +
                                      hex_hash(m.corpus_hash) + " vs " + hex_hash(chash) + ")");
        }
        ensemble.push_back(std::move(m));
      }
      InteractionLog train_log = ingest_interactions_csv(*train_log_path, corpus);
      InteractionLog test_log = ingest_interactions_csv(*test_log_path, corpus);
      EvalReport report = ope_evaluate(ensemble, train_log, test_log, corpus, *seed);
      std::string json = report.to_json();
      if (report_out->empty()) {
        std::cout << json;
      } else {
        write_text(*report_out, json);
      }
      if (!strategy_out->empty()) write_text(*strategy_out, report.per_strategy_csv());
    }));
  }

  // ------------------------------------------------------------------- loo
  {
    auto* cmd = app.add_subcommand("loo", "Leave-one-DM-out on-policy accuracy");
    auto args = std::make_shared<CommonArgs>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto corpus_path = std::make_shared<std::string>();
    auto log_path = std::make_shared<std::string>();
    cmd->add_option("--seed", *seed, "Master seed")->required();
    cmd->add_option("--corpus", *corpus_path, "Corpus CSV")->required();
    cmd->add_option("--log", *log_path, "Interactions CSV")->required();
    add_config_flags(cmd, *args);
    cmd->callback(defer([=, cmd] {
      apply_config_flags(cmd, *args);
      Corpus corpus = load_corpus(*corpus_path);
      InteractionLog log = ingest_interactions_csv(*log_path, corpus);
      double acc = loo_on_policy(args->config.predictor(), log, corpus, *seed);
      std::cout << "loo_accuracy=" << acc << " config_hash=" << hex_hash(args->config.hash())
                << "\n";
    }));
  }

  // ---------------------------------------------------------------- ablate
  {
    auto* cmd = app.add_subcommand("ablate", "Sweep eta, s_r, or the heuristic subsets");
    auto args = std::make_shared<CommonArgs>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto corpus_path = std::make_shared<std::string>();
    auto axis_name = std::make_shared<std::string>();
    auto grid = std::make_shared<std::vector<double>>();
    auto out = std::make_shared<std::string>("ablation.csv");
    cmd->add_option("--seed", *seed, "Master seed")->required();
    cmd->add_option("--corpus", *corpus_path, "Corpus CSV")->required();
    cmd->add_option("--axis", *axis_name, "eta | s_r | heuristics")->required();
    cmd->add_option("--grid", *grid, "Grid values (ignored for heuristics)");
    cmd->add_option("--out", *out, "Output CSV path");
    add_config_flags(cmd, *args);
    cmd->callback(defer([=, cmd] {
      apply_config_flags(cmd, *args);
      AblationAxis axis;
      if (*axis_name == "eta") {
        axis = AblationAxis::Eta;
      } else if (*axis_name == "s_r") {
        axis = AblationAxis::SR;
      } else if (*axis_name == "heuristics") {
        axis = AblationAxis::HeuristicSubsets;
      } else {
        throw std::invalid_argument("--axis must be eta, s_r or heuristics");
      }
      if (axis != AblationAxis::HeuristicSubsets && grid->empty()) {
        throw std::invalid_argument("--grid is required for the eta and s_r axes");
      }
      Corpus corpus = load_corpus(*corpus_path);
      std::vector<EnumeratedStrategy> space = enumerate_strategies();
      OpeProtocol protocol = args->config.ope_protocol();
      protocol.seed = *seed;
      PseudoHumanData data = make_pseudo_human_data(corpus, space, protocol);
      // The mixing simulation must not leak the held-out test strategies.
      BuiltinSets sets = builtin_sets(space);
      std::set<std::string> test_ids;
      for (const EnumeratedStrategy& s : sets.set_b) test_ids.insert(s.id);
      std::vector<EnumeratedStrategy> train_space;
      for (const EnumeratedStrategy& s : space) {
        if (!test_ids.count(s.id)) train_space.push_back(s);
      }
      std::vector<AblationRow> rows = ablation_sweep(
          axis, *grid, args->config.predictor(), args->config.mix_schedule(),
          args->config.sim_persona(), data, train_space, corpus, *seed,
          static_cast<int>(args->config.get_int("threads", 1)));
      write_text(*out, ablation_csv(rows, args->config.hash()));
      std::cout << "rows=" << rows.size() << " out=" << *out << "\n";
    }));
  }

  // ------------------------------------------------------------- correlate
  {
    auto* cmd = app.add_subcommand("correlate",
                                   "Pearson similarity of two logs' Go-rate vectors");
    auto corpus_path = std::make_shared<std::string>();
    auto log_a = std::make_shared<std::string>();
    auto log_b = std::make_shared<std::string>();
    auto min_count = std::make_shared<int>(5);
    cmd->add_option("--corpus", *corpus_path, "Corpus CSV")->required();
    cmd->add_option("--log-a", *log_a, "First interactions CSV")->required();
    cmd->add_option("--log-b", *log_b, "Second interactions CSV")->required();
    cmd->add_option("--min-count", *min_count, "Minimum observations per aligned bucket");
    cmd->callback(defer([=] {
      Corpus corpus = load_corpus(*corpus_path);
      InteractionLog a = ingest_interactions_csv(*log_a, corpus);
      InteractionLog b = ingest_interactions_csv(*log_b, corpus);
      CorrelationReport report = correlation_report(a, b, *min_count);
      std::cout << "{\n  \"review_vector_r\": " << report.review_vector_r
                << ",\n  \"history_vector_r\": " << report.history_vector_r
                << ",\n  \"review_buckets\": " << report.review_buckets
                << ",\n  \"history_buckets\": " << report.history_buckets << "\n}\n";
    }));
  }

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
