#pragma once

#include <map>
#include <string>
#include <vector>

#include "persuasion/eval.hpp"
#include "persuasion/predictors.hpp"
#include "persuasion/sim.hpp"
#include "persuasion/trainer.hpp"

namespace persuasion {

std::uint64_t fnv1a_64(const std::string& bytes);

// Flat key=value run configuration ('#' comments and blank lines allowed).
// Unknown keys are rejected; the hash covers the canonical sorted key=value
// rendering and is embedded in every run artifact.
class RunConfig {
 public:
  static const std::vector<std::string>& known_keys();

  static RunConfig from_string(const std::string& text);
  static RunConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Sorted "key=value\n" lines; `threads` is excluded because the worker
  // count never changes results.
  std::string canonical_string() const;
  std::uint64_t hash() const { return fnv1a_64(canonical_string()); }

  // Typed views over the relevant key groups.
  PredictorConfig predictor() const;
  MixSchedule mix_schedule() const;
  SimPersonaConfig sim_persona() const;
  EpisodeOptions episode_options() const;
  OpeProtocol ope_protocol() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace persuasion
