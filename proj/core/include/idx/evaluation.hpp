#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idx/influence.hpp"
#include "idx/kits.hpp"
#include "idx/model.hpp"

namespace idx {

struct PrevalenceRow {
  std::string label;
  double pct = 0;        // mean over instances of 100 * |relation| / |influences|
  double class_pct = 0;  // same numerator restricted to class-to-class edges
};

struct PrevalenceReport {
  std::string kit;
  std::size_t instance_count = 0;
  std::size_t influence_count = 0;
  std::vector<PrevalenceRow> rows;  // kit type order
};

// Mean share of influences standing in each of the kit's relations across
// the instances. Full kits are measured over the full influence graph,
// attribution kits over the input-output graph of their outputs.
PrevalenceReport prevalence(const Classifier& c, const ExplanationKit& kit,
                            const std::vector<Assignment>& instances, unsigned jobs = 1);

struct AgreementReport {
  std::string kit_a;
  std::string kit_b;
  std::size_t instance_count = 0;
  std::size_t edge_count = 0;  // input-output influences compared
  double pct = 0;
};

// Share of input-output influences on which both kits identify the same
// (possibly empty) set of relations, compared across types of equal
// polarity; mean over instances. Each kit contributes its relations
// restricted to the edges of its own influence graph, so a full kit is
// never asked about pairs it cannot see.
AgreementReport agreement(const Classifier& c, const ExplanationKit& kit_a,
                          const ExplanationKit& kit_b, const std::vector<std::string>& outputs,
                          const std::vector<Assignment>& instances, unsigned jobs = 1);

struct MonotonicityReport {
  std::string kit;
  std::size_t population = 0;  // relation edges found across all instances
  std::size_t sampled = 0;
  std::size_t violations = 0;
  double rate = 0;  // violations / sampled; 0 when nothing was sampled
};

// Samples attack/support relation edges across instances and flags those
// where some single change of the influencer moves the posterior of the
// influenced variable's decided value the wrong way: not strictly up for an
// attack, not strictly down for a support. Full kits clamp the other
// influencers at their decided values; input-output kits re-run the whole
// chain on the modified input.
MonotonicityReport monotonicity_violations(const Classifier& c, const ExplanationKit& kit,
                                           const std::vector<Assignment>& instances,
                                           std::size_t sample_size, std::uint64_t seed,
                                           unsigned jobs = 1);

struct ComplexityReport {
  std::string kit;
  std::uint64_t measured = 0;          // distinct posterior evaluations during generate
  std::uint64_t linear_cost = 0;       // sum over scopes of 1 + sum (|values(x)| - 1)
  std::uint64_t enumeration_size = 0;  // sum over scopes of prod |values(x)|
};

// Runs generate once with a freshly built kit ("md", "sd" or "cf") and
// reports the instrumented evaluation count next to the closed-form costs
// over the influencer scopes reachable from the explanandum.
ComplexityReport complexity_probe(const Classifier& c, const std::string& kit_name,
                                  const std::string& explanandum, const Assignment& a,
                                  std::uint64_t cf_budget = kDefaultCfBudget);

// Deterministic random classifiers for property sweeps: 2 to 5 variables,
// binary classifications, observations with 2 to 4 values (2 when
// all_binary), strictly positive random tables, at least one edge.
Classifier random_classifier(std::uint64_t seed, bool all_binary);
Assignment random_observation_assignment(const Classifier& c, std::uint64_t seed);

struct PropositionReport {
  std::size_t trials = 0;
  std::vector<std::string> counterexamples;
};

// Property sweep over seeded random classifiers (every third trial
// all-binary): monotonic relations imply stochastic ones; the two coincide
// for binary influencers; critical influences are monotonic supports (and
// so stochastic ones) wherever every single-change world is feasible, i.e.
// for flat scopes and for binary influencers; the full and input-output
// influence graphs coincide exactly for flat class-to-observation
// structures.
PropositionReport check_propositions(std::uint64_t seed, std::size_t trials);

}  // namespace idx
