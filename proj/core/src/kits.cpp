#include "idx/kits.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "idx/errors.hpp"
#include "idx/inference.hpp"

namespace idx {
namespace {

using detail::KitInstrumentation;

enum class DialecticMode { Monotonic, Stochastic };

// Everything an MD/SD predicate needs about one influenced variable under
// one assignment, computed once: the decided value, its posterior, and that
// posterior under every single-influencer change.
struct ScopeEval {
  struct Influencer {
    int var = -1;
    int decided = -1;
    std::vector<double> alt_posterior;  // [k] = posterior with var at k; [decided] = base
    double alt_prior_mass = 0;
  };

  int sigma = -1;
  double base = 0;
  std::vector<Influencer> influencers;  // dependency-children order
};

// Counterfactual worlds for one influenced variable: only influencer
// configurations that some complete input actually produces (chained
// classifications re-decided per world), mapped to the decision they induce.
struct CfScope {
  std::uint64_t combos = 0;  // worlds enumerated: product over support observation domains
  std::map<std::vector<int>, int> feasible;
};

struct PerAssignment {
  detail::IndexedAssignment ia;
  std::map<int, int> decided;
  // (variable, child config) -> normalized posterior. Misses are what the
  // instrumentation counts, so repeated lookups stay free.
  std::map<std::pair<int, std::vector<int>>, std::vector<double>> posteriors;
  std::map<int, ScopeEval> scopes;
  std::map<int, CfScope> cf_scopes;
};

// Cached, counted posterior evaluation shared by the dialectical and
// counterfactual predicates of one kit. Guarded by the instrumentation
// mutex; predicates stay safe to call from parallel edge evaluations.
class Evaluator {
public:
  Evaluator(const Classifier& c, std::shared_ptr<KitInstrumentation> instr)
      : c_(c), instr_(std::move(instr)) {}

  bool dialectical(DialecticMode mode, bool attack, const InfluenceEdge& edge,
                   const Assignment& a) {
    std::lock_guard<std::mutex> lock(instr_->mu);
    PerAssignment& pa = state_for(a);
    const ScopeEval& se = scope(pa, check_edge(edge));
    const ScopeEval::Influencer* inf = nullptr;
    for (const auto& candidate : se.influencers) {
      if (candidate.var == edge.source) inf = &candidate;
    }
    if (!inf) throw usage_no_influence(edge);

    if (mode == DialecticMode::Monotonic) {
      for (std::size_t k = 0; k < inf->alt_posterior.size(); ++k) {
        if (static_cast<int>(k) == inf->decided) continue;
        double p = inf->alt_posterior[k];
        if (attack ? !(se.base < p) : !(se.base > p)) return false;
      }
      return true;
    }

    if (inf->alt_prior_mass <= 0) {
      if (warned_.insert({edge.source, edge.target}).second) {
        instr_->diagnostics.push_back(
            "alternatives of '" + c_.variable(edge.source).name +
            "' have zero prior mass; stochastic relation undefined for its influence on '" +
            c_.variable(edge.target).name + "'");
      }
      return false;
    }
    double mean = 0;
    for (std::size_t k = 0; k < inf->alt_posterior.size(); ++k) {
      if (static_cast<int>(k) == inf->decided) continue;
      mean += c_.prior(inf->var, static_cast<int>(k)) * inf->alt_posterior[k];
    }
    mean /= inf->alt_prior_mass;
    return attack ? se.base < mean : se.base > mean;
  }

  bool counterfactual(bool want_critical, const InfluenceEdge& edge, const Assignment& a,
                      std::uint64_t budget) {
    std::lock_guard<std::mutex> lock(instr_->mu);
    PerAssignment& pa = state_for(a);
    int y = check_edge(edge);
    const auto& children = c_.children(y);
    int slot = -1;
    for (std::size_t j = 0; j < children.size(); ++j) {
      if (children[j] == edge.source) slot = static_cast<int>(j);
    }
    if (slot < 0) throw usage_no_influence(edge);

    const CfScope& sc = cf_scope(pa, y, budget);
    const int sigma_y = value_of(pa, y);
    const int x_count = static_cast<int>(c_.variable(edge.source).domain.size());
    const auto slot_u = static_cast<std::size_t>(slot);

    std::vector<int> base(children.size());
    for (std::size_t j = 0; j < children.size(); ++j) base[j] = value_of(pa, children[j]);

    // Critical: some world changes only x's decided value, and every such
    // world flips the decision.
    bool any_single = false;
    bool all_flip = true;
    for (const auto& [config, sig] : sc.feasible) {
      if (config[slot_u] == base[slot_u]) continue;
      bool others_at_base = true;
      for (std::size_t j = 0; j < config.size(); ++j) {
        if (j != slot_u && config[j] != base[j]) {
          others_at_base = false;
          break;
        }
      }
      if (!others_at_base) continue;
      any_single = true;
      if (sig == sigma_y) all_flip = false;
    }
    const bool critical = any_single && all_flip;
    if (want_critical) return critical;
    if (critical) return false;

    // Potential: two worlds agreeing on the other influencers, x at its
    // decided value in one and changed in the other, where only the second
    // flips the decision. The pair need not keep the others at their values
    // under a.
    for (const auto& [config, sig] : sc.feasible) {
      if (config[slot_u] != base[slot_u] || sig != sigma_y) continue;
      auto changed = config;
      for (int k = 0; k < x_count; ++k) {
        if (k == base[slot_u]) continue;
        changed[slot_u] = k;
        auto it = sc.feasible.find(changed);
        if (it != sc.feasible.end() && it->second != sigma_y) return true;
      }
    }
    return false;
  }

private:
  UsageError usage_no_influence(const InfluenceEdge& edge) const {
    return UsageError("'" + c_.variable(edge.source).name + "' does not influence '" +
                      c_.variable(edge.target).name + "'");
  }

  int check_edge(const InfluenceEdge& edge) const {
    const int n = static_cast<int>(c_.variable_count());
    if (edge.source < 0 || edge.source >= n || edge.target < 0 || edge.target >= n) {
      throw UsageError("invalid influence edge");
    }
    return edge.target;
  }

  PerAssignment& state_for(const Assignment& a) {
    auto ia = detail::index_assignment(c_, a);
    auto it = by_assignment_.find(ia.values);
    if (it == by_assignment_.end()) {
      it = by_assignment_.emplace(ia.values, PerAssignment{}).first;
      it->second.ia = std::move(ia);
    }
    return it->second;
  }

  const std::vector<double>& posterior(PerAssignment& pa, int v, std::vector<int> cfg) {
    auto key = std::make_pair(v, std::move(cfg));
    auto it = pa.posteriors.find(key);
    if (it == pa.posteriors.end()) {
      ++instr_->posterior_evaluations;
      auto scores = detail::local_scores(c_, v, key.second);
      detail::normalize_scores(c_, v, scores);
      it = pa.posteriors.emplace(std::move(key), std::move(scores)).first;
    }
    return it->second;
  }

  int value_of(PerAssignment& pa, int v) {
    if (pa.ia.bound[v]) return pa.ia.values[v];
    auto it = pa.decided.find(v);
    if (it != pa.decided.end()) return it->second;
    const auto& children = c_.children(v);
    std::vector<int> cfg(children.size());
    for (std::size_t j = 0; j < children.size(); ++j) cfg[j] = value_of(pa, children[j]);
    int idx = detail::argmax_index(posterior(pa, v, std::move(cfg)));
    pa.decided[v] = idx;
    return idx;
  }

  const ScopeEval& scope(PerAssignment& pa, int y) {
    auto it = pa.scopes.find(y);
    if (it != pa.scopes.end()) return it->second;
    const auto& children = c_.children(y);
    std::vector<int> cfg(children.size());
    for (std::size_t j = 0; j < children.size(); ++j) cfg[j] = value_of(pa, children[j]);

    ScopeEval se;
    se.sigma = value_of(pa, y);
    se.base = posterior(pa, y, cfg)[se.sigma];
    for (std::size_t j = 0; j < children.size(); ++j) {
      int x = children[j];
      ScopeEval::Influencer inf;
      inf.var = x;
      inf.decided = cfg[j];
      inf.alt_posterior.assign(c_.variable(x).domain.size(), se.base);
      for (int k = 0; k < static_cast<int>(inf.alt_posterior.size()); ++k) {
        if (k == inf.decided) continue;
        auto changed = cfg;
        changed[static_cast<std::size_t>(j)] = k;
        inf.alt_posterior[k] = posterior(pa, y, std::move(changed))[se.sigma];
        inf.alt_prior_mass += c_.prior(x, k);
      }
      se.influencers.push_back(std::move(inf));
    }
    return pa.scopes.emplace(y, std::move(se)).first->second;
  }

  // Observations that feed the decisions of y's influencers (and y itself),
  // walking dependency children through chained classifications.
  std::set<int> support_observations(int y) const {
    std::set<int> obs;
    std::vector<char> seen(c_.variable_count(), 0);
    std::vector<int> stack(c_.children(y).begin(), c_.children(y).end());
    for (int v : stack) seen[static_cast<std::size_t>(v)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (c_.is_observation(v)) {
        obs.insert(v);
        continue;
      }
      for (int z : c_.children(v)) {
        if (!seen[static_cast<std::size_t>(z)]) {
          seen[static_cast<std::size_t>(z)] = 1;
          stack.push_back(z);
        }
      }
    }
    return obs;
  }

  const CfScope& cf_scope(PerAssignment& pa, int y, std::uint64_t budget) {
    auto it = pa.cf_scopes.find(y);
    if (it == pa.cf_scopes.end()) {
      const std::set<int> obs = support_observations(y);
      constexpr std::uint64_t kCap = std::numeric_limits<std::uint64_t>::max();
      std::uint64_t combos = 1;
      for (int x : obs) {
        auto k = static_cast<std::uint64_t>(c_.variable(x).domain.size());
        combos = combos > kCap / k ? kCap : combos * k;
      }
      CfScope sc;
      sc.combos = combos;
      if (combos <= budget) fill_feasible(pa, y, obs, sc.feasible);
      it = pa.cf_scopes.emplace(y, std::move(sc)).first;
    }
    // The budget is per call; a cached scope may still exceed a smaller one.
    if (it->second.combos > budget) throw BudgetError("counterfactual budget exceeded");
    if (it->second.feasible.empty()) fill_feasible(pa, y, support_observations(y), it->second.feasible);
    return it->second;
  }

  void fill_feasible(PerAssignment& pa, int y, const std::set<int>& obs,
                     std::map<std::vector<int>, int>& table) {
    const auto& children = c_.children(y);
    const std::vector<int> vars(obs.begin(), obs.end());
    std::map<int, int> world;  // observation -> value in the current combo
    for (int v : vars) world[v] = 0;
    while (true) {
      std::map<int, int> memo;  // classification decisions in this world
      auto solve = [&](auto&& self, int v) -> int {
        if (c_.is_observation(v)) return world.at(v);
        auto mit = memo.find(v);
        if (mit != memo.end()) return mit->second;
        const auto& ch = c_.children(v);
        std::vector<int> cfg(ch.size());
        for (std::size_t j = 0; j < ch.size(); ++j) cfg[j] = self(self, ch[j]);
        int val = detail::argmax_index(posterior(pa, v, std::move(cfg)));
        memo.emplace(v, val);
        return val;
      };
      std::vector<int> cfg(children.size());
      for (std::size_t j = 0; j < children.size(); ++j) cfg[j] = solve(solve, children[j]);
      int decision = detail::argmax_index(posterior(pa, y, cfg));
      table.emplace(std::move(cfg), decision);

      std::size_t j = 0;
      for (; j < vars.size(); ++j) {
        if (++world[vars[j]] < static_cast<int>(c_.variable(vars[j]).domain.size())) break;
        world[vars[j]] = 0;
      }
      if (j == vars.size()) break;
    }
  }

  const Classifier& c_;
  std::shared_ptr<KitInstrumentation> instr_;
  std::map<std::vector<int>, PerAssignment> by_assignment_;
  std::set<std::pair<int, int>> warned_;
};

// Attribution scores cached per assignment; score diagnostics surface once
// through the kit.
class AttrEvaluator {
public:
  AttrEvaluator(const Classifier& c, std::shared_ptr<AttributionSource> source,
                std::vector<std::string> outputs, std::shared_ptr<KitInstrumentation> instr)
      : c_(c), source_(std::move(source)), outputs_(std::move(outputs)),
        instr_(std::move(instr)) {}

  bool test(bool attack, const InfluenceEdge& edge, const Assignment& a) {
    std::lock_guard<std::mutex> lock(instr_->mu);
    auto ia = detail::index_assignment(c_, a);
    auto it = scores_.find(ia.values);
    if (it == scores_.end()) {
      AttributionScores scores = source_->scores(c_, a, outputs_);
      for (const auto& d : scores.diagnostics) instr_->diagnostics.push_back(d);
      it = scores_.emplace(std::move(ia.values), std::move(scores)).first;
    }
    double v = it->second.at(c_.variable(edge.source).name, c_.variable(edge.target).name);
    return attack ? v < 0 : v > 0;
  }

private:
  const Classifier& c_;
  std::shared_ptr<AttributionSource> source_;
  std::vector<std::string> outputs_;
  std::shared_ptr<KitInstrumentation> instr_;
  std::map<std::vector<int>, AttributionScores> scores_;
};

}  // namespace

ExplanationKit::ExplanationKit(std::string name, GraphKind graph_kind,
                               std::vector<std::pair<RelationType, RelationPredicate>> pairs,
                               std::vector<std::string> outputs)
    : ExplanationKit(std::move(name), graph_kind, std::move(pairs), std::move(outputs),
                     std::make_shared<KitInstrumentation>()) {}

ExplanationKit::ExplanationKit(std::string name, GraphKind graph_kind,
                               std::vector<std::pair<RelationType, RelationPredicate>> pairs,
                               std::vector<std::string> outputs,
                               std::shared_ptr<detail::KitInstrumentation> instrumentation)
    : name_(std::move(name)), graph_kind_(graph_kind), pairs_(std::move(pairs)),
      outputs_(std::move(outputs)), instrumentation_(std::move(instrumentation)) {
  if (pairs_.empty()) {
    throw UsageError("an explanation kit needs at least one relation type");
  }
  std::set<std::string> labels;
  for (const auto& [type, predicate] : pairs_) {
    if (!labels.insert(type.label).second) {
      throw UsageError("duplicate relation label '" + type.label + "'");
    }
    if (!predicate) {
      throw UsageError("relation '" + type.label + "' has no predicate");
    }
  }
}

int ExplanationKit::type_index(const std::string& label) const {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].first.label == label) return static_cast<int>(i);
  }
  return -1;
}

std::uint64_t ExplanationKit::posterior_evaluations() const {
  std::lock_guard<std::mutex> lock(instrumentation_->mu);
  return instrumentation_->posterior_evaluations;
}

std::vector<std::string> ExplanationKit::diagnostics() const {
  std::lock_guard<std::mutex> lock(instrumentation_->mu);
  return instrumentation_->diagnostics;
}

bool md_attack(const Classifier& c, const InfluenceEdge& edge, const Assignment& a) {
  return Evaluator(c, std::make_shared<KitInstrumentation>())
      .dialectical(DialecticMode::Monotonic, true, edge, a);
}

bool md_support(const Classifier& c, const InfluenceEdge& edge, const Assignment& a) {
  return Evaluator(c, std::make_shared<KitInstrumentation>())
      .dialectical(DialecticMode::Monotonic, false, edge, a);
}

bool sd_attack(const Classifier& c, const InfluenceEdge& edge, const Assignment& a) {
  return Evaluator(c, std::make_shared<KitInstrumentation>())
      .dialectical(DialecticMode::Stochastic, true, edge, a);
}

bool sd_support(const Classifier& c, const InfluenceEdge& edge, const Assignment& a) {
  return Evaluator(c, std::make_shared<KitInstrumentation>())
      .dialectical(DialecticMode::Stochastic, false, edge, a);
}

bool cf_critical(const Classifier& c, const InfluenceEdge& edge, const Assignment& a,
                 std::uint64_t budget) {
  return Evaluator(c, std::make_shared<KitInstrumentation>())
      .counterfactual(true, edge, a, budget);
}

bool cf_potential(const Classifier& c, const InfluenceEdge& edge, const Assignment& a,
                  std::uint64_t budget) {
  return Evaluator(c, std::make_shared<KitInstrumentation>())
      .counterfactual(false, edge, a, budget);
}

bool attr_attack(const Classifier& c, const AttributionScores& scores,
                 const InfluenceEdge& edge) {
  return scores.at(c.variable(edge.source).name, c.variable(edge.target).name) < 0;
}

bool attr_support(const Classifier& c, const AttributionScores& scores,
                  const InfluenceEdge& edge) {
  return scores.at(c.variable(edge.source).name, c.variable(edge.target).name) > 0;
}

ExplanationKit make_kit(const std::string& name, const Classifier& c, const KitOptions& opts) {
  using Polarity = RelationType::Polarity;
  auto instr = std::make_shared<KitInstrumentation>();

  if (name == "md" || name == "sd") {
    auto mode = name == "md" ? DialecticMode::Monotonic : DialecticMode::Stochastic;
    auto ev = std::make_shared<Evaluator>(c, instr);
    RelationType attack{name == "md" ? "monotonic-attack" : "stochastic-attack",
                        name == "md" ? "−" : "·−", Polarity::Attack};
    RelationType support{name == "md" ? "monotonic-support" : "stochastic-support",
                         name == "md" ? "+" : "·+", Polarity::Support};
    std::vector<std::pair<RelationType, RelationPredicate>> pairs;
    pairs.emplace_back(attack, [ev, mode](const InfluenceEdge& e, const Assignment& a) {
      return ev->dialectical(mode, true, e, a);
    });
    pairs.emplace_back(support, [ev, mode](const InfluenceEdge& e, const Assignment& a) {
      return ev->dialectical(mode, false, e, a);
    });
    return ExplanationKit(name, GraphKind::Full, std::move(pairs), {}, std::move(instr));
  }

  if (name == "cf") {
    auto ev = std::make_shared<Evaluator>(c, instr);
    auto budget = opts.cf_budget;
    std::vector<std::pair<RelationType, RelationPredicate>> pairs;
    pairs.emplace_back(RelationType{"critical", "!", Polarity::Neutral},
                       [ev, budget](const InfluenceEdge& e, const Assignment& a) {
                         return ev->counterfactual(true, e, a, budget);
                       });
    pairs.emplace_back(RelationType{"potential", "*", Polarity::Neutral},
                       [ev, budget](const InfluenceEdge& e, const Assignment& a) {
                         return ev->counterfactual(false, e, a, budget);
                       });
    return ExplanationKit(name, GraphKind::Full, std::move(pairs), {}, std::move(instr));
  }

  std::shared_ptr<AttributionSource> source = opts.source;
  if (name == "lime") {
    source = make_surrogate_source(opts.surrogate);
  } else if (name == "shap") {
    source = make_shapley_source();
  } else if (name.rfind("file:", 0) == 0) {
    source = make_file_source(name.substr(5), opts.resolve_instance);
  } else if (name == "attribution") {
    if (!source) throw UsageError("kit 'attribution' needs an attribution source");
  } else {
    throw UsageError("unknown kit '" + name + "'");
  }
  if (opts.outputs.empty()) {
    throw UsageError("attribution kits need at least one output classification");
  }
  io_influences(c, opts.outputs);  // fail fast on bad outputs

  auto ev = std::make_shared<AttrEvaluator>(c, std::move(source), opts.outputs, instr);
  std::vector<std::pair<RelationType, RelationPredicate>> pairs;
  pairs.emplace_back(RelationType{"attr-attack", "−", Polarity::Attack},
                     [ev](const InfluenceEdge& e, const Assignment& a) {
                       return ev->test(true, e, a);
                     });
  pairs.emplace_back(RelationType{"attr-support", "+", Polarity::Support},
                     [ev](const InfluenceEdge& e, const Assignment& a) {
                       return ev->test(false, e, a);
                     });
  return ExplanationKit(name, GraphKind::InputOutput, std::move(pairs), opts.outputs,
                        std::move(instr));
}

}  // namespace idx
