#pragma once

#include <string>
#include <vector>

#include "idx/model.hpp"

namespace idx {

enum class GraphKind { Full, InputOutput };

struct InfluenceEdge {
  int source = -1;
  int target = -1;
  friend auto operator<=>(const InfluenceEdge&, const InfluenceEdge&) = default;
};

// Directed graph of influences (x, y): x feeds the estimation of
// classification y. Edges are kept sorted by (target, source); adjacency is
// queryable in both directions.
class InfluenceGraph {
public:
  InfluenceGraph(GraphKind kind, std::size_t variable_count, std::vector<InfluenceEdge> edges,
                 std::vector<int> outputs);

  GraphKind kind() const { return kind_; }
  const std::vector<InfluenceEdge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int source, int target) const;

  // Influencers of v (edge sources), ascending.
  const std::vector<int>& parents(int v) const { return parents_[v]; }
  // Variables influenced by v (edge targets), ascending.
  const std::vector<int>& targets(int v) const { return targets_[v]; }

  // The output classifications this graph was built for (all classifications
  // for the full graph).
  const std::vector<int>& outputs() const { return outputs_; }

  bool operator==(const InfluenceGraph& other) const {
    return kind_ == other.kind_ && edges_ == other.edges_;
  }

private:
  GraphKind kind_;
  std::vector<InfluenceEdge> edges_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> targets_;
  std::vector<int> outputs_;
};

// Influences of c: one edge (x, y) per dependency edge (y, x) with y a
// classification.
InfluenceGraph influences(const Classifier& c);

// Input-output influences: every (observation, output) pair for the given
// output classifications. Outputs must be non-empty, unique classifications.
InfluenceGraph io_influences(const Classifier& c, const std::vector<std::string>& outputs);

// True iff influences(c) and io_influences(c, outputs) have equal edge sets.
bool coincide(const Classifier& c, const std::vector<std::string>& outputs);

// Graphviz rendering; influence edges are dashed, observations grey-filled.
std::string influence_to_dot(const Classifier& c, const InfluenceGraph& g);

}  // namespace idx
