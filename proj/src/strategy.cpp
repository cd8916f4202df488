#include "persuasion/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace persuasion {

const char* to_string(SplitCondition c) {
  switch (c) {
    case SplitCondition::CurrentHotelGood: return "current_hotel_good";
    case SplitCondition::PrevWentHotel: return "prev_went_hotel";
    case SplitCondition::PrevHotelGood: return "prev_hotel_good";
    case SplitCondition::PointsExceedGoCount: return "points_exceed_go_count";
  }
  return "?";
}

const char* to_string(ActionRule a) {
  switch (a) {
    case ActionRule::SendBest: return "best";
    case ActionRule::SendMean: return "mean";
    case ActionRule::SendWorst: return "worst";
  }
  return "?";
}

const char* to_string(StrategyClass c) {
  switch (c) {
    case StrategyClass::Simple: return "simple";
    case StrategyClass::QualityDependent: return "quality_dependent";
    case StrategyClass::HistoryDependent: return "history_dependent";
    case StrategyClass::Complex: return "complex";
  }
  return "?";
}

std::unique_ptr<StrategyNode> StrategyNode::clone() const {
  auto n = std::make_unique<StrategyNode>();
  n->is_leaf = is_leaf;
  n->action = action;
  n->cond = cond;
  if (!is_leaf) {
    n->on_true = on_true->clone();
    n->on_false = on_false->clone();
  }
  return n;
}

StrategyTree StrategyTree::leaf(ActionRule a) {
  auto n = std::make_unique<StrategyNode>();
  n->is_leaf = true;
  n->action = a;
  return StrategyTree(std::move(n));
}

StrategyTree StrategyTree::split(SplitCondition c, StrategyTree t, StrategyTree f) {
  auto n = std::make_unique<StrategyNode>();
  n->is_leaf = false;
  n->cond = c;
  n->on_true = t.root_->clone();
  n->on_false = f.root_->clone();
  return StrategyTree(std::move(n));
}

namespace {

int node_depth(const StrategyNode& n) {
  if (n.is_leaf) return 0;
  return 1 + std::max(node_depth(*n.on_true), node_depth(*n.on_false));
}

// State bit layout matches BehavioralSignature's index.
int state_index(bool chg, bool pwh, bool phg, bool pxg) {
  return (chg ? 8 : 0) | (pwh ? 4 : 0) | (phg ? 2 : 0) | (pxg ? 1 : 0);
}

bool state_bit(int state, SplitCondition c) {
  switch (c) {
    case SplitCondition::CurrentHotelGood: return state & 8;
    case SplitCondition::PrevWentHotel: return state & 4;
    case SplitCondition::PrevHotelGood: return state & 2;
    case SplitCondition::PointsExceedGoCount: return state & 1;
  }
  return false;
}

ActionRule eval_node(const StrategyNode& n, int state) {
  if (n.is_leaf) return n.action;
  return eval_node(state_bit(state, n.cond) ? *n.on_true : *n.on_false, state);
}

using Constraints = std::array<std::optional<bool>, kConditionCount>;

bool state_consistent(int state, const Constraints& cons) {
  for (int c = 0; c < kConditionCount; ++c) {
    if (cons[c] && state_bit(state, static_cast<SplitCondition>(c)) != *cons[c]) return false;
  }
  return true;
}

std::unique_ptr<StrategyNode> canonicalize_node(const StrategyNode& n, Constraints cons) {
  if (n.is_leaf) return n.clone();
  int ci = static_cast<int>(n.cond);
  if (cons[ci]) {
    // Condition already fixed along the path.
    return canonicalize_node(*cons[ci] ? *n.on_true : *n.on_false, cons);
  }
  Constraints cons_t = cons, cons_f = cons;
  cons_t[ci] = true;
  cons_f[ci] = false;
  auto t = canonicalize_node(*n.on_true, cons_t);
  auto f = canonicalize_node(*n.on_false, cons_f);
  // Children no longer reference n.cond, so compare them on every state
  // consistent with the outer constraints.
  bool identical = true;
  for (int s = 0; s < 16 && identical; ++s) {
    if (state_consistent(s, cons) && eval_node(*t, s) != eval_node(*f, s)) identical = false;
  }
  if (identical) return t;
  auto out = std::make_unique<StrategyNode>();
  out->is_leaf = false;
  out->cond = n.cond;
  out->on_true = std::move(t);
  out->on_false = std::move(f);
  return out;
}

void collect_conditions(const StrategyNode& n, std::set<SplitCondition>& out) {
  if (n.is_leaf) return;
  out.insert(n.cond);
  collect_conditions(*n.on_true, out);
  collect_conditions(*n.on_false, out);
}

}  // namespace

int StrategyTree::depth() const { return node_depth(*root_); }

bool eval_condition(SplitCondition cond, std::span<const RoundRecord> history,
                    const Hotel& current_hotel) {
  switch (cond) {
    case SplitCondition::CurrentHotelGood:
      return current_hotel.good;
    case SplitCondition::PrevWentHotel:
      return !history.empty() && history.back().decision == Decision::Go;
    case SplitCondition::PrevHotelGood:
      return !history.empty() && history.back().hotel_good;
    case SplitCondition::PointsExceedGoCount: {
      int points = 0, gos = 0;
      for (const RoundRecord& r : history) {
        points += r.payoff;
        gos += r.decision == Decision::Go ? 1 : 0;
      }
      return points > gos;
    }
  }
  return false;
}

ActionRule action_for_state(const StrategyTree& strategy, bool chg, bool pwh, bool phg,
                            bool pxg) {
  return eval_node(strategy.root(), state_index(chg, pwh, phg, pxg));
}

int review_for_action(ActionRule action, const Hotel& hotel) {
  const auto& reviews = hotel.reviews;
  int best = 0;
  switch (action) {
    case ActionRule::SendBest:
      for (int i = 1; i < static_cast<int>(reviews.size()); ++i) {
        if (reviews[i].score > reviews[best].score) best = i;
      }
      return best;
    case ActionRule::SendWorst:
      for (int i = 1; i < static_cast<int>(reviews.size()); ++i) {
        if (reviews[i].score < reviews[best].score) best = i;
      }
      return best;
    case ActionRule::SendMean: {
      double mean = hotel.mean_score;
      double bd = std::abs(reviews[0].score - mean);
      for (int i = 1; i < static_cast<int>(reviews.size()); ++i) {
        double d = std::abs(reviews[i].score - mean);
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      return best;
    }
  }
  return 0;
}

int select_review(const StrategyTree& strategy, std::span<const RoundRecord> history,
                  const Hotel& hotel) {
  int state = state_index(eval_condition(SplitCondition::CurrentHotelGood, history, hotel),
                          eval_condition(SplitCondition::PrevWentHotel, history, hotel),
                          eval_condition(SplitCondition::PrevHotelGood, history, hotel),
                          eval_condition(SplitCondition::PointsExceedGoCount, history, hotel));
  return review_for_action(eval_node(strategy.root(), state), hotel);
}

BehavioralSignature behavioral_signature(const StrategyTree& strategy) {
  BehavioralSignature sig;
  for (int s = 0; s < 16; ++s) sig[s] = eval_node(strategy.root(), s);
  return sig;
}

std::string signature_string(const BehavioralSignature& sig) {
  static const char kChars[3] = {'B', 'M', 'W'};
  std::string out(16, '?');
  for (int i = 0; i < 16; ++i) out[i] = kChars[static_cast<int>(sig[i])];
  return out;
}

StrategyTree canonicalize(const StrategyTree& strategy) {
  return StrategyTree(canonicalize_node(strategy.root(), Constraints{}));
}

StrategyClass classify_strategy(const StrategyTree& strategy) {
  std::set<SplitCondition> conds;
  collect_conditions(strategy.root(), conds);
  bool quality = conds.count(SplitCondition::CurrentHotelGood) > 0;
  bool history = conds.count(SplitCondition::PrevWentHotel) > 0 ||
                 conds.count(SplitCondition::PrevHotelGood) > 0 ||
                 conds.count(SplitCondition::PointsExceedGoCount) > 0;
  if (!quality && !history) return StrategyClass::Simple;
  if (quality && !history) return StrategyClass::QualityDependent;
  if (!quality && history) return StrategyClass::HistoryDependent;
  return StrategyClass::Complex;
}

std::vector<EnumeratedStrategy> enumerate_strategies(int max_depth) {
  // Candidate subtrees of depth <= 1: 3 leaves + 36 single splits.
  std::vector<StrategyTree> shallow;
  for (int a = 0; a < kActionCount; ++a) {
    shallow.push_back(StrategyTree::leaf(static_cast<ActionRule>(a)));
  }
  std::vector<StrategyTree> depth1;
  for (int c = 0; c < kConditionCount; ++c) {
    for (int at = 0; at < kActionCount; ++at) {
      for (int af = 0; af < kActionCount; ++af) {
        depth1.push_back(StrategyTree::split(static_cast<SplitCondition>(c),
                                             StrategyTree::leaf(static_cast<ActionRule>(at)),
                                             StrategyTree::leaf(static_cast<ActionRule>(af))));
      }
    }
  }

  std::vector<StrategyTree> candidates = shallow;
  if (max_depth >= 1) {
    for (const auto& t : depth1) candidates.push_back(t);
  }
  if (max_depth >= 2) {
    std::vector<StrategyTree> children = shallow;
    for (const auto& t : depth1) children.push_back(t);
    for (int c = 0; c < kConditionCount; ++c) {
      for (const auto& ct : children) {
        for (const auto& cf : children) {
          candidates.push_back(
              StrategyTree::split(static_cast<SplitCondition>(c), ct, cf));
        }
      }
    }
  }

  // Dedup by behavioral signature, keeping a minimal-depth representative.
  std::map<std::string, StrategyTree> by_sig;
  for (const auto& t : candidates) {
    StrategyTree canon = canonicalize(t);
    std::string key = signature_string(behavioral_signature(canon));
    auto it = by_sig.find(key);
    if (it == by_sig.end()) {
      by_sig.emplace(key, std::move(canon));
    } else if (canon.depth() < it->second.depth()) {
      it->second = std::move(canon);
    }
  }

  std::vector<EnumeratedStrategy> out;
  out.reserve(by_sig.size());
  int idx = 0;
  for (auto& [key, tree] : by_sig) {
    EnumeratedStrategy e;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%04d", idx++);
    e.id = buf;
    e.signature = behavioral_signature(tree);
    e.depth = tree.depth();
    e.cls = classify_strategy(tree);
    e.tree = std::move(tree);
    out.push_back(std::move(e));
  }
  return out;
}

StrategyTree greedy_strategy() { return StrategyTree::leaf(ActionRule::SendBest); }

StrategyTree honest_strategy() {
  return StrategyTree::split(SplitCondition::CurrentHotelGood,
                             StrategyTree::leaf(ActionRule::SendBest),
                             StrategyTree::leaf(ActionRule::SendWorst));
}

StrategyTree backward_looking_strategy() {
  return StrategyTree::split(SplitCondition::PrevWentHotel,
                             StrategyTree::leaf(ActionRule::SendBest),
                             StrategyTree::leaf(ActionRule::SendMean));
}

namespace {

int hamming(const BehavioralSignature& a, const BehavioralSignature& b) {
  int d = 0;
  for (int i = 0; i < 16; ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

int find_by_signature(const std::vector<EnumeratedStrategy>& all,
                      const BehavioralSignature& sig) {
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    if (all[i].signature == sig) return i;
  }
  throw std::logic_error("builtin_sets: named strategy not found in enumeration");
}

}  // namespace

BuiltinSets builtin_sets(const std::vector<EnumeratedStrategy>& all, std::uint64_t seed) {
  int greedy = find_by_signature(all, behavioral_signature(greedy_strategy()));
  int honest = find_by_signature(all, behavioral_signature(honest_strategy()));
  int backward = find_by_signature(all, behavioral_signature(backward_looking_strategy()));

  std::vector<int> a = {greedy, honest};
  std::vector<int> b = {backward};
  std::set<int> taken = {greedy, honest, backward};

  auto covered = [&](const std::vector<int>& set, StrategyClass cls) {
    for (int i : set) {
      if (all[i].cls == cls) return true;
    }
    return false;
  };
  // Larger is better: maximize the min signature distance to the already
  // chosen strategies of both sets; ties broken by a seed-keyed hash.
  auto pick = [&](const std::vector<int>& own, std::optional<StrategyClass> want) {
    int best = -1;
    long best_score = -1;
    std::uint64_t best_tie = 0;
    for (int i = 0; i < static_cast<int>(all.size()); ++i) {
      if (taken.count(i)) continue;
      if (want && all[i].cls != *want) continue;
      int min_d = 17;
      for (int j : own) min_d = std::min(min_d, hamming(all[i].signature, all[j].signature));
      for (int j : (&own == &a ? b : a)) {
        min_d = std::min(min_d, hamming(all[i].signature, all[j].signature));
      }
      std::uint64_t tie = derive_seed(seed, {static_cast<std::uint64_t>(i)});
      if (min_d > best_score || (min_d == best_score && tie > best_tie)) {
        best_score = min_d;
        best_tie = tie;
        best = i;
      }
    }
    if (best < 0) throw std::logic_error("builtin_sets: no candidate available");
    return best;
  };

  const StrategyClass classes[] = {StrategyClass::Simple, StrategyClass::QualityDependent,
                                   StrategyClass::HistoryDependent, StrategyClass::Complex};
  for (auto* set : {&a, &b}) {
    for (StrategyClass cls : classes) {
      if (!covered(*set, cls)) {
        int i = pick(*set, cls);
        set->push_back(i);
        taken.insert(i);
      }
    }
  }
  while (a.size() < 6 || b.size() < 6) {
    if (a.size() <= b.size() && a.size() < 6) {
      int i = pick(a, std::nullopt);
      a.push_back(i);
      taken.insert(i);
    } else {
      int i = pick(b, std::nullopt);
      b.push_back(i);
      taken.insert(i);
    }
  }

  BuiltinSets out;
  for (int i : a) out.set_a.push_back(all[i]);
  for (int i : b) out.set_b.push_back(all[i]);
  return out;
}

std::array<double, 7> induced_reveal_distribution(const StrategyTree& strategy,
                                                  std::span<const DecisionPolicy> dm_population,
                                                  std::span<const Hotel> hotels,
                                                  std::uint64_t seed, int n_games) {
  if (dm_population.empty()) throw std::invalid_argument("empty DM population");
  if (hotels.size() < kRoundsPerGame) throw std::invalid_argument("need >= 10 hotels");
  std::array<std::int64_t, 7> counts{};
  Rng rng(seed);
  std::vector<int> order(hotels.size());
  for (std::size_t i = 0; i < hotels.size(); ++i) order[i] = static_cast<int>(i);
  for (int g = 0; g < n_games; ++g) {
    const DecisionPolicy& policy = dm_population[g % dm_population.size()];
    // Partial Fisher-Yates: 10 distinct hotels per game.
    for (int k = 0; k < kRoundsPerGame; ++k) {
      std::size_t j = k + rng.below(order.size() - k);
      std::swap(order[k], order[j]);
    }
    std::vector<RoundRecord> history;
    for (int t = 0; t < kRoundsPerGame; ++t) {
      const Hotel& h = hotels[order[t]];
      int slot = select_review(strategy, history, h);
      // Rank 0 = best: strictly higher scores, then equal scores at lower index.
      int rank = 0;
      for (int i = 0; i < static_cast<int>(h.reviews.size()); ++i) {
        if (h.reviews[i].score > h.reviews[slot].score ||
            (h.reviews[i].score == h.reviews[slot].score && i < slot)) {
          ++rank;
        }
      }
      counts[rank]++;
      RoundRecord r;
      r.round_index = t + 1;
      r.hotel = order[t];
      r.review_slot = static_cast<std::int8_t>(slot);
      r.decision = policy(history, h, slot, rng);
      r.hotel_good = h.good;
      r.payoff = static_cast<std::int8_t>(round_payoff(r.decision, h.good));
      history.push_back(r);
    }
  }
  std::array<double, 7> dist{};
  double total = static_cast<double>(n_games) * kRoundsPerGame;
  for (int i = 0; i < 7; ++i) dist[i] = static_cast<double>(counts[i]) / total;
  return dist;
}

namespace {

nlohmann::json node_to_json(const StrategyNode& n) {
  if (n.is_leaf) return nlohmann::json{{"leaf", to_string(n.action)}};
  return nlohmann::json{{"cond", to_string(n.cond)},
                        {"true", node_to_json(*n.on_true)},
                        {"false", node_to_json(*n.on_false)}};
}

ActionRule action_from_name(const std::string& s) {
  if (s == "best") return ActionRule::SendBest;
  if (s == "mean") return ActionRule::SendMean;
  if (s == "worst") return ActionRule::SendWorst;
  throw std::invalid_argument("unknown action: " + s);
}

SplitCondition cond_from_name(const std::string& s) {
  for (int c = 0; c < kConditionCount; ++c) {
    if (s == to_string(static_cast<SplitCondition>(c))) return static_cast<SplitCondition>(c);
  }
  throw std::invalid_argument("unknown condition: " + s);
}

std::unique_ptr<StrategyNode> node_from_json(const nlohmann::json& j, int depth) {
  if (depth > 2) throw std::invalid_argument("strategy tree deeper than 2");
  auto n = std::make_unique<StrategyNode>();
  if (j.contains("leaf")) {
    n->is_leaf = true;
    n->action = action_from_name(j.at("leaf").get<std::string>());
  } else {
    n->is_leaf = false;
    n->cond = cond_from_name(j.at("cond").get<std::string>());
    n->on_true = node_from_json(j.at("true"), depth + 1);
    n->on_false = node_from_json(j.at("false"), depth + 1);
  }
  return n;
}

}  // namespace

std::string strategy_to_json(const StrategyTree& strategy) {
  return node_to_json(strategy.root()).dump(2);
}

StrategyTree strategy_from_json(const std::string& json_text) {
  return StrategyTree(node_from_json(nlohmann::json::parse(json_text), 0));
}

}  // namespace persuasion
