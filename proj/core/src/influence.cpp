#include "idx/influence.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "idx/errors.hpp"

namespace idx {

InfluenceGraph::InfluenceGraph(GraphKind kind, std::size_t variable_count,
                               std::vector<InfluenceEdge> edges, std::vector<int> outputs)
    : kind_(kind), edges_(std::move(edges)), outputs_(std::move(outputs)) {
  std::sort(edges_.begin(), edges_.end(),
            [](const InfluenceEdge& a, const InfluenceEdge& b) {
              return std::tie(a.target, a.source) < std::tie(b.target, b.source);
            });
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  parents_.assign(variable_count, {});
  targets_.assign(variable_count, {});
  for (const auto& e : edges_) {
    parents_[e.target].push_back(e.source);
    targets_[e.source].push_back(e.target);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& t : targets_) std::sort(t.begin(), t.end());
  std::sort(outputs_.begin(), outputs_.end());
}

bool InfluenceGraph::has_edge(int source, int target) const {
  const auto& p = parents_[target];
  return std::binary_search(p.begin(), p.end(), source);
}

InfluenceGraph influences(const Classifier& c) {
  std::vector<InfluenceEdge> edges;
  for (auto [parent, child] : c.edges()) {
    edges.push_back({child, parent});  // child influences its classifying parent
  }
  return InfluenceGraph(GraphKind::Full, c.variable_count(), std::move(edges),
                        c.classifications());
}

namespace {

std::vector<int> resolve_outputs(const Classifier& c, const std::vector<std::string>& outputs) {
  if (outputs.empty()) throw UsageError("outputs must be non-empty");
  std::set<int> seen;
  std::vector<int> resolved;
  for (const auto& name : outputs) {
    int v = c.index_of(name);
    if (v < 0) throw UsageError("unknown output '" + name + "'");
    if (c.is_observation(v)) throw UsageError("output '" + name + "' is not a classification");
    if (!seen.insert(v).second) throw UsageError("duplicate output '" + name + "'");
    resolved.push_back(v);
  }
  return resolved;
}

}  // namespace

InfluenceGraph io_influences(const Classifier& c, const std::vector<std::string>& outputs) {
  auto out = resolve_outputs(c, outputs);
  std::vector<InfluenceEdge> edges;
  edges.reserve(c.observations().size() * out.size());
  for (int y : out) {
    for (int x : c.observations()) edges.push_back({x, y});
  }
  return InfluenceGraph(GraphKind::InputOutput, c.variable_count(), std::move(edges),
                        std::move(out));
}

bool coincide(const Classifier& c, const std::vector<std::string>& outputs) {
  return influences(c).edges() == io_influences(c, outputs).edges();
}

std::string influence_to_dot(const Classifier& c, const InfluenceGraph& g) {
  std::ostringstream out;
  out << "digraph influences {\n";
  out << "  rankdir=BT;\n";
  std::set<int> used;
  for (const auto& e : g.edges()) {
    used.insert(e.source);
    used.insert(e.target);
  }
  for (int v : used) {
    const auto& var = c.variable(v);
    out << "  \"" << var.name << "\"";
    if (c.is_observation(v)) out << " [style=filled, fillcolor=grey]";
    out << ";\n";
  }
  for (const auto& e : g.edges()) {
    out << "  \"" << c.variable(e.source).name << "\" -> \"" << c.variable(e.target).name
        << "\" [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace idx
