#pragma once

#include <string>
#include <utility>
#include <vector>

#include "idx/influence.hpp"
#include "idx/kits.hpp"
#include "idx/model.hpp"

namespace idx {

// An influence-driven explanation: the explanandum, the variables relevant
// to it, the relation edges that hold between them under one input, and a
// value snapshot so the structure is self-contained.
struct Idx {
  struct Relation {
    RelationType type;
    // (influencer, influenced) name pairs, sorted.
    std::vector<std::pair<std::string, std::string>> edges;

    friend bool operator==(const Relation&, const Relation&) = default;
  };

  std::string kit;
  GraphKind graph_kind = GraphKind::Full;
  std::string explanandum;
  std::vector<std::string> relevant;      // sorted names; always contains the explanandum
  std::vector<std::string> observations;  // the relevant variables that are observations
  std::vector<Relation> relations;        // kit type order
  Assignment input;                       // the explained input
  Assignment snapshot;                    // value under the input for every relevant variable

  friend bool operator==(const Idx&, const Idx&) = default;
};

// Explains `explanandum` under `a`: walks influencers depth-first from the
// explanandum (each variable expanded once), records every relation edge
// whose predicate holds, then prunes variables that do not reach the
// explanandum through relation edges. Throws UsageError when the explanandum
// is not a classification (or not an output of an input-output graph) or
// when the kit reads a different graph kind than g.
Idx generate(const Classifier& c, const InfluenceGraph& g, const ExplanationKit& kit,
             const std::string& explanandum, const Assignment& a);

struct Violation {
  std::string kind;  // "membership" | "predicate" | "connectivity"
  std::string detail;
};

// Re-checks a generated (or deserialized) explanation against its inputs:
// relation edges must lie in g between relevant variables, their predicates
// must hold under a, and every relevant variable must reach the explanandum
// through relation edges. Violations come back as data, never as errors.
std::vector<Violation> validate(const Idx& idx, const Classifier& c, const InfluenceGraph& g,
                                const ExplanationKit& kit, const Assignment& a);

// Graphviz rendering: nodes labelled "name=value", observations grey-filled,
// edges labelled with their relation symbol.
std::string to_dot(const Idx& idx);

// Lossless JSON serialization, format tag "idx/1".
std::string to_json(const Idx& idx);
Idx idx_from_json(const std::string& text);

}  // namespace idx
