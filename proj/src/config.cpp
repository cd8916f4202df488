#include "persuasion/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace persuasion {

std::uint64_t fnv1a_64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "seed",
      "threads",
      "corpus.n_hotels",
      "corpus.seed",
      "persona.eta",
      "persona.epsilon",
      "persona.trustful",
      "persona.language",
      "persona.random",
      "sim.dms",
      "sim.target",
      "sim.cap",
      "sim.scope",           // per_game | per_bot
      "sim.strategies_per_dm",
      "predictor.kind",      // majority | ff | lstm
      "predictor.hidden",
      "predictor.layers",
      "predictor.lr",
      "predictor.epochs",
      "predictor.seed",
      "mix.s_r",
      "mix.regenerate",
      "eval.train_dms",
      "eval.test_dms",
  };
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw std::invalid_argument("unknown config key: " + key);
  }
  values_[key] = value;
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_string(buf.str());
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long RunConfig::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t pos = 0;
  long v = std::stol(it->second, &pos);
  if (pos != it->second.size()) throw std::invalid_argument(key + ": not an integer");
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t pos = 0;
  double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) throw std::invalid_argument(key + ": not a number");
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument(key + ": not a boolean");
}

std::string RunConfig::canonical_string() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) {
    // The worker-thread count never affects results, so it must not change
    // the configuration identity embedded in artifacts.
    if (k == "threads") continue;
    out << k << '=' << v << '\n';
  }
  return out.str();
}

PredictorConfig RunConfig::predictor() const {
  PredictorConfig c;
  c.kind = predictor_kind_from_name(get("predictor.kind", "lstm"));
  c.hidden_size = static_cast<int>(get_int("predictor.hidden", c.hidden_size));
  c.n_layers = static_cast<int>(get_int("predictor.layers", c.n_layers));
  c.learning_rate = get_double("predictor.lr", c.learning_rate);
  c.epochs = static_cast<int>(get_int("predictor.epochs", c.epochs));
  c.seed = static_cast<std::uint64_t>(get_int("predictor.seed", static_cast<long>(c.seed)));
  return c;
}

MixSchedule RunConfig::mix_schedule() const {
  MixSchedule s;
  s.s_r = get_double("mix.s_r", 0.0);
  s.regenerate_per_epoch = get_bool("mix.regenerate", true);
  return s;
}

EpisodeOptions RunConfig::episode_options() const {
  EpisodeOptions e;
  e.target = static_cast<int>(get_int("sim.target", e.target));
  e.cap = static_cast<int>(get_int("sim.cap", e.cap));
  std::string scope = get("sim.scope", "per_game");
  if (scope == "per_game") {
    e.scope = TemperamentScope::PerGame;
  } else if (scope == "per_bot") {
    e.scope = TemperamentScope::PerBot;
  } else {
    throw std::invalid_argument("sim.scope must be per_game or per_bot");
  }
  return e;
}

SimPersonaConfig RunConfig::sim_persona() const {
  SimPersonaConfig p;
  p.eta = get_double("persona.eta", p.eta);
  p.epsilon = get_double("persona.epsilon", p.epsilon);
  p.mask.trustful = get_bool("persona.trustful", true);
  p.mask.language = get_bool("persona.language", true);
  p.mask.random = get_bool("persona.random", true);
  p.episode = episode_options();
  p.strategies_per_dm = static_cast<int>(get_int("sim.strategies_per_dm", 6));
  p.threads = static_cast<int>(get_int("threads", 1));
  return p;
}

OpeProtocol RunConfig::ope_protocol() const {
  OpeProtocol p;
  p.train_dms = static_cast<int>(get_int("eval.train_dms", p.train_dms));
  p.test_dms = static_cast<int>(get_int("eval.test_dms", p.test_dms));
  p.seed = static_cast<std::uint64_t>(get_int("seed", 1));
  p.episode = episode_options();
  p.threads = static_cast<int>(get_int("threads", 1));
  return p;
}

}  // namespace persuasion
