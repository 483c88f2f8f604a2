#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "idx/attribution.hpp"
#include "idx/influence.hpp"
#include "idx/model.hpp"

namespace idx {

// A relation type names one way an influence can matter: label keys the
// relation set in serialized output, symbol annotates rendered edges,
// polarity drives dialectical checks (attack vs support) and cross-kit
// correspondence.
struct RelationType {
  enum class Polarity { Attack, Support, Neutral };

  std::string label;
  std::string symbol;
  Polarity polarity = Polarity::Neutral;

  friend bool operator==(const RelationType&, const RelationType&) = default;
};

// True iff the relation of this type holds for the influence edge under the
// input assignment.
using RelationPredicate = std::function<bool(const InfluenceEdge&, const Assignment&)>;

namespace detail {

// Shared by a kit and its predicate closures. posterior_evaluations counts
// distinct posterior computations (cache misses), the quantity the
// complexity probes compare against the closed-form counts.
struct KitInstrumentation {
  mutable std::mutex mu;
  std::uint64_t posterior_evaluations = 0;
  std::vector<std::string> diagnostics;
};

}  // namespace detail

// A named bundle of (relation type, predicate) pairs tied to the influence
// graph kind it reads edges from. Copies share the same instrumentation and
// caches. The kit borrows the classifier passed to make_kit; keep it alive.
class ExplanationKit {
public:
  ExplanationKit(std::string name, GraphKind graph_kind,
                 std::vector<std::pair<RelationType, RelationPredicate>> pairs,
                 std::vector<std::string> outputs = {});

  const std::string& name() const { return name_; }
  GraphKind graph_kind() const { return graph_kind_; }
  // Output classifications of an input-output kit; empty for full-graph kits.
  const std::vector<std::string>& outputs() const { return outputs_; }

  std::size_t type_count() const { return pairs_.size(); }
  const RelationType& type(std::size_t i) const { return pairs_[i].first; }
  // Index of the type with this label, -1 if absent.
  int type_index(const std::string& label) const;

  bool holds(std::size_t i, const InfluenceEdge& edge, const Assignment& a) const {
    return pairs_[i].second(edge, a);
  }

  std::uint64_t posterior_evaluations() const;
  std::vector<std::string> diagnostics() const;

private:
  friend ExplanationKit make_kit(const std::string&, const Classifier&,
                                 const struct KitOptions&);
  ExplanationKit(std::string name, GraphKind graph_kind,
                 std::vector<std::pair<RelationType, RelationPredicate>> pairs,
                 std::vector<std::string> outputs,
                 std::shared_ptr<detail::KitInstrumentation> instrumentation);

  std::string name_;
  GraphKind graph_kind_;
  std::vector<std::pair<RelationType, RelationPredicate>> pairs_;
  std::vector<std::string> outputs_;
  std::shared_ptr<detail::KitInstrumentation> instrumentation_;
};

// Monotonic predicates: strict inequality against the posterior of the
// decided value of y under every alternative value of x, with y's other
// influencers clamped at their decided values. Attack: every alternative
// raises it. Support: every alternative lowers it.
bool md_attack(const Classifier& c, const InfluenceEdge& edge, const Assignment& a);
bool md_support(const Classifier& c, const InfluenceEdge& edge, const Assignment& a);

// Stochastic predicates: same modified inputs, but compared against the
// prior-weighted mean over the alternatives. Zero prior mass on the
// alternatives makes both predicates false.
bool sd_attack(const Classifier& c, const InfluenceEdge& edge, const Assignment& a);
bool sd_support(const Classifier& c, const InfluenceEdge& edge, const Assignment& a);

inline constexpr std::uint64_t kDefaultCfBudget = 1000000;

// Counterfactual predicates, by exhaustive enumeration of the joint values
// of y's influencer set (each combination clamped as evidence). Critical:
// every change of x away from its decided value flips y's decision while the
// other influencers stay at theirs. Potential: not critical, yet for some
// joint value of the other influencers, changing only x flips y's decision
// away from its value under a. Throws BudgetError("counterfactual budget
// exceeded") when the enumeration would exceed `budget` combinations.
bool cf_critical(const Classifier& c, const InfluenceEdge& edge, const Assignment& a,
                 std::uint64_t budget = kDefaultCfBudget);
bool cf_potential(const Classifier& c, const InfluenceEdge& edge, const Assignment& a,
                  std::uint64_t budget = kDefaultCfBudget);

// Sign tests on an attribution score; an exact zero yields neither relation.
bool attr_attack(const Classifier& c, const AttributionScores& scores, const InfluenceEdge& edge);
bool attr_support(const Classifier& c, const AttributionScores& scores, const InfluenceEdge& edge);

struct KitOptions {
  std::uint64_t cf_budget = kDefaultCfBudget;
  // Attribution kits only: the output classifications of the io influence
  // graph the kit reads edges from.
  std::vector<std::string> outputs;
  SurrogateParams surrogate;
  // Source for kit name "attribution"; overrides the name-derived source
  // otherwise.
  std::shared_ptr<AttributionSource> source;
  // Maps an assignment to the instance id of a score file ("0" when unset).
  std::function<std::string(const Assignment&)> resolve_instance;
};

// Kit registry. Full-graph kits: "md" (monotonic attack/support), "sd"
// (stochastic attack/support), "cf" (critical/potential). Input-output kits:
// "lime" (built-in surrogate), "shap" (exact Shapley), "file:<path>"
// (imported scores), "attribution" (opts.source). Attribution kits require
// opts.outputs. Throws UsageError on unknown names.
ExplanationKit make_kit(const std::string& name, const Classifier& c,
                        const KitOptions& opts = {});

}  // namespace idx
