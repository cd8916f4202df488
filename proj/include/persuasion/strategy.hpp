#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "persuasion/game.hpp"
#include "persuasion/rng.hpp"

namespace persuasion {

enum class SplitCondition : std::uint8_t {
  CurrentHotelGood = 0,
  PrevWentHotel = 1,
  PrevHotelGood = 2,
  PointsExceedGoCount = 3,
};
inline constexpr int kConditionCount = 4;

enum class ActionRule : std::uint8_t { SendBest = 0, SendMean = 1, SendWorst = 2 };
inline constexpr int kActionCount = 3;

const char* to_string(SplitCondition c);
const char* to_string(ActionRule a);

// Leaf(action) or Split(condition, true_child, false_child); depth <= 2.
struct StrategyNode {
  bool is_leaf = true;
  ActionRule action = ActionRule::SendBest;
  SplitCondition cond = SplitCondition::CurrentHotelGood;
  std::unique_ptr<StrategyNode> on_true;
  std::unique_ptr<StrategyNode> on_false;

  std::unique_ptr<StrategyNode> clone() const;
};

class StrategyTree {
 public:
  StrategyTree() : root_(std::make_unique<StrategyNode>()) {}
  explicit StrategyTree(std::unique_ptr<StrategyNode> root) : root_(std::move(root)) {}
  StrategyTree(const StrategyTree& other) : root_(other.root_->clone()) {}
  StrategyTree& operator=(const StrategyTree& other) {
    root_ = other.root_->clone();
    return *this;
  }
  StrategyTree(StrategyTree&&) = default;
  StrategyTree& operator=(StrategyTree&&) = default;

  static StrategyTree leaf(ActionRule a);
  static StrategyTree split(SplitCondition c, StrategyTree t, StrategyTree f);

  const StrategyNode& root() const { return *root_; }
  int depth() const;

 private:
  std::unique_ptr<StrategyNode> root_;
};

// Total behavior over the 16 condition-bit states. Index bit layout:
// bit3 = CurrentHotelGood, bit2 = PrevWentHotel, bit1 = PrevHotelGood,
// bit0 = PointsExceedGoCount.
using BehavioralSignature = std::array<ActionRule, 16>;

// Signature as 16 chars over {B, M, W}.
std::string signature_string(const BehavioralSignature& sig);

enum class StrategyClass : std::uint8_t {
  Simple = 0,
  QualityDependent = 1,
  HistoryDependent = 2,
  Complex = 3,
};
const char* to_string(StrategyClass c);

// `history` holds the rounds of the current game strictly before the
// current round; at round 1 all history conditions default to false.
bool eval_condition(SplitCondition cond, std::span<const RoundRecord> history,
                    const Hotel& current_hotel);

// Review index 0..6 chosen by walking the tree. SendBest/SendWorst pick the
// extreme score, SendMean the review closest to the arithmetic mean of the
// hotel's scores; all ties break to the lowest review index.
int select_review(const StrategyTree& strategy, std::span<const RoundRecord> history,
                  const Hotel& hotel);

ActionRule action_for_state(const StrategyTree& strategy, bool current_good,
                            bool prev_went, bool prev_good, bool points_exceed_go);

int review_for_action(ActionRule action, const Hotel& hotel);

BehavioralSignature behavioral_signature(const StrategyTree& strategy);

// Removes conditions repeated along a path and splits whose children are
// behaviorally identical. Idempotent.
StrategyTree canonicalize(const StrategyTree& strategy);

StrategyClass classify_strategy(const StrategyTree& strategy);

struct EnumeratedStrategy {
  std::string id;  // "s0000".. in enumeration order
  StrategyTree tree;
  BehavioralSignature signature;
  int depth = 0;
  StrategyClass cls = StrategyClass::Simple;
};

// Every behaviorally distinct depth-<= max_depth tree, deduplicated by
// signature, ordered lexicographically by signature. Deterministic.
std::vector<EnumeratedStrategy> enumerate_strategies(int max_depth = 2);

struct BuiltinSets {
  std::vector<EnumeratedStrategy> set_a;  // contains greedy and honest
  std::vector<EnumeratedStrategy> set_b;  // contains backward-looking
};

// Deterministic disjoint 6+6 selection covering all four classes per set.
BuiltinSets builtin_sets(const std::vector<EnumeratedStrategy>& all, std::uint64_t seed = 17);

// The three named strategies from the strategy space.
StrategyTree greedy_strategy();
StrategyTree honest_strategy();
StrategyTree backward_looking_strategy();

// A decision rule standing in for a (simulated) DM when estimating the
// reveal-rank distribution a strategy induces.
using DecisionPolicy =
    std::function<Decision(std::span<const RoundRecord>, const Hotel&, int, Rng&)>;

// Monte Carlo estimate of the rank (0 = best score .. 6 = worst) of the
// revealed review under play by the given population. Sums to 1.
std::array<double, 7> induced_reveal_distribution(const StrategyTree& strategy,
                                                  std::span<const DecisionPolicy> dm_population,
                                                  std::span<const Hotel> hotels,
                                                  std::uint64_t seed, int n_games = 2000);

// JSON schema: {"leaf": "best|mean|worst"} or
// {"cond": <name>, "true": <node>, "false": <node>}.
std::string strategy_to_json(const StrategyTree& strategy);
StrategyTree strategy_from_json(const std::string& json_text);

}  // namespace persuasion
