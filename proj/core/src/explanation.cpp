#include "idx/explanation.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "idx/errors.hpp"
#include "idx/inference.hpp"
#include "json.hpp"

namespace idx {

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '"';
  return out;
}

std::string polarity_name(RelationType::Polarity p) {
  switch (p) {
    case RelationType::Polarity::Attack: return "attack";
    case RelationType::Polarity::Support: return "support";
    default: return "neutral";
  }
}

RelationType::Polarity polarity_from(const std::string& s, const std::string& origin) {
  if (s == "attack") return RelationType::Polarity::Attack;
  if (s == "support") return RelationType::Polarity::Support;
  if (s == "neutral") return RelationType::Polarity::Neutral;
  throw DataError(origin + ": unknown polarity '" + s + "'");
}

}  // namespace

Idx generate(const Classifier& c, const InfluenceGraph& g, const ExplanationKit& kit,
             const std::string& explanandum, const Assignment& a) {
  const int e = c.require_index(explanandum);
  if (c.is_observation(e)) {
    throw UsageError("explanandum '" + explanandum + "' is not a classification");
  }
  if (kit.graph_kind() != g.kind()) {
    throw UsageError(std::string("kit '") + kit.name() + "' expects " +
                     (kit.graph_kind() == GraphKind::Full ? "a full" : "an input-output") +
                     " influence graph");
  }
  if (g.kind() == GraphKind::InputOutput &&
      !std::binary_search(g.outputs().begin(), g.outputs().end(), e)) {
    throw UsageError("explanandum '" + explanandum +
                     "' is not an output of the influence graph");
  }

  // Depth-first expansion from the explanandum, each variable once.
  std::vector<char> visited(c.variable_count(), 0);
  std::vector<std::set<std::pair<int, int>>> held(kit.type_count());
  std::vector<int> stack = {e};
  visited[e] = 1;
  while (!stack.empty()) {
    int y = stack.back();
    stack.pop_back();
    for (int x : g.parents(y)) {
      InfluenceEdge edge{x, y};
      for (std::size_t t = 0; t < kit.type_count(); ++t) {
        if (kit.holds(t, edge, a)) held[t].insert({x, y});
      }
      if (!visited[x]) {
        visited[x] = 1;
        stack.push_back(x);
      }
    }
  }

  // Keep only variables that reach the explanandum through relation edges.
  std::set<int> reach = {e};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& edges : held) {
      for (const auto& [x, y] : edges) {
        if (reach.count(y) && !reach.count(x)) {
          reach.insert(x);
          grew = true;
        }
      }
    }
  }

  Idx idx;
  idx.kit = kit.name();
  idx.graph_kind = g.kind();
  idx.explanandum = explanandum;
  for (int v : reach) idx.relevant.push_back(c.variable(v).name);
  std::sort(idx.relevant.begin(), idx.relevant.end());
  for (int v : reach) {
    if (c.is_observation(v)) idx.observations.push_back(c.variable(v).name);
  }
  std::sort(idx.observations.begin(), idx.observations.end());

  for (std::size_t t = 0; t < kit.type_count(); ++t) {
    Idx::Relation rel;
    rel.type = kit.type(t);
    for (const auto& [x, y] : held[t]) {
      if (!reach.count(y)) continue;
      rel.edges.emplace_back(c.variable(x).name, c.variable(y).name);
    }
    std::sort(rel.edges.begin(), rel.edges.end());
    idx.relations.push_back(std::move(rel));
  }

  idx.input = a;
  detail::Chain chain(c, a);
  for (int v : reach) {
    idx.snapshot.bind(c.variable(v).name, c.variable(v).domain.value(chain.value_of(v)));
  }
  return idx;
}

std::vector<Violation> validate(const Idx& idx, const Classifier& c, const InfluenceGraph& g,
                                const ExplanationKit& kit, const Assignment& a) {
  std::vector<Violation> out;
  std::set<std::string> relevant(idx.relevant.begin(), idx.relevant.end());
  if (!relevant.count(idx.explanandum)) {
    out.push_back({"membership", "explanandum '" + idx.explanandum + "' is not relevant"});
  }

  // Relation edges: known type, edge of the influence graph, both endpoints
  // relevant, predicate holds under a.
  std::set<std::pair<std::string, std::string>> relation_edges;
  for (const auto& rel : idx.relations) {
    int t = kit.type_index(rel.type.label);
    if (t < 0) {
      // Flag the label once; its edges still count for connectivity below,
      // so one bad label does not cascade into stranded-variable reports.
      out.push_back({"membership", "relation label '" + rel.type.label + "' is not in the kit"});
    }
    for (const auto& [sname, tname] : rel.edges) {
      std::string edge_text = "('" + sname + "', '" + tname + "')";
      int x = c.index_of(sname);
      int y = c.index_of(tname);
      if (x < 0 || y < 0 || !g.has_edge(x, y)) {
        out.push_back({"membership", edge_text + " is not an influence"});
        continue;
      }
      if (!relevant.count(sname) || !relevant.count(tname)) {
        out.push_back({"membership", edge_text + " leaves the relevant set"});
        continue;
      }
      relation_edges.insert({sname, tname});
      if (t >= 0 && !kit.holds(static_cast<std::size_t>(t), InfluenceEdge{x, y}, a)) {
        out.push_back(
            {"predicate", "'" + rel.type.label + "' does not hold for " + edge_text});
      }
    }
  }

  // Connectivity: walk relation edges backwards from the explanandum.
  std::set<std::string> reach = {idx.explanandum};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [sname, tname] : relation_edges) {
      if (reach.count(tname) && !reach.count(sname)) {
        reach.insert(sname);
        grew = true;
      }
    }
  }
  for (const auto& name : idx.relevant) {
    if (!reach.count(name)) {
      out.push_back({"connectivity",
                     "'" + name + "' does not reach '" + idx.explanandum +
                         "' through relation edges"});
    }
  }
  return out;
}

std::string to_dot(const Idx& idx) {
  std::set<std::string> obs(idx.observations.begin(), idx.observations.end());
  std::ostringstream out;
  out << "digraph idx {\n  rankdir=BT;\n";
  for (const auto& name : idx.relevant) {
    out << "  " << dot_quote(name) << " [label=" << dot_quote(name + "=" + idx.snapshot.at(name));
    if (obs.count(name)) out << ", style=filled, fillcolor=lightgrey";
    out << "];\n";
  }
  for (const auto& rel : idx.relations) {
    for (const auto& [sname, tname] : rel.edges) {
      out << "  " << dot_quote(sname) << " -> " << dot_quote(tname)
          << " [label=" << dot_quote(rel.type.symbol) << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string to_json(const Idx& idx) {
  nlohmann::ordered_json doc;
  doc["format"] = "idx/1";
  doc["kit"] = idx.kit;
  doc["graph"] = idx.graph_kind == GraphKind::Full ? "full" : "io";
  doc["explanandum"] = idx.explanandum;
  doc["relevant"] = idx.relevant;
  doc["observations"] = idx.observations;
  auto& rels = doc["relations"] = nlohmann::ordered_json::array();
  for (const auto& rel : idx.relations) {
    nlohmann::ordered_json r;
    r["label"] = rel.type.label;
    r["symbol"] = rel.type.symbol;
    r["polarity"] = polarity_name(rel.type.polarity);
    auto& edges = r["edges"] = nlohmann::ordered_json::array();
    for (const auto& [sname, tname] : rel.edges) {
      edges.push_back(nlohmann::ordered_json::array({sname, tname}));
    }
    rels.push_back(std::move(r));
  }
  doc["input"] = nlohmann::ordered_json::object();
  for (const auto& [var, value] : idx.input.entries()) doc["input"][var] = value;
  doc["snapshot"] = nlohmann::ordered_json::object();
  for (const auto& [var, value] : idx.snapshot.entries()) doc["snapshot"][var] = value;
  return doc.dump(2) + "\n";
}

Idx idx_from_json(const std::string& text) {
  const std::string origin = "idx json";
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(origin + ": " + std::string(e.what()));
  }
  try {
    if (doc.value("format", "") != "idx/1") {
      throw DataError(origin + ": expected format \"idx/1\"");
    }
    Idx idx;
    idx.kit = doc.at("kit").get<std::string>();
    std::string graph = doc.at("graph").get<std::string>();
    if (graph != "full" && graph != "io") {
      throw DataError(origin + ": unknown graph kind '" + graph + "'");
    }
    idx.graph_kind = graph == "full" ? GraphKind::Full : GraphKind::InputOutput;
    idx.explanandum = doc.at("explanandum").get<std::string>();
    idx.relevant = doc.at("relevant").get<std::vector<std::string>>();
    idx.observations = doc.at("observations").get<std::vector<std::string>>();
    for (const auto& r : doc.at("relations")) {
      Idx::Relation rel;
      rel.type.label = r.at("label").get<std::string>();
      rel.type.symbol = r.at("symbol").get<std::string>();
      rel.type.polarity = polarity_from(r.at("polarity").get<std::string>(), origin);
      for (const auto& edge : r.at("edges")) {
        if (!edge.is_array() || edge.size() != 2) {
          throw DataError(origin + ": relation edges must be [source, target] pairs");
        }
        rel.edges.emplace_back(edge[0].get<std::string>(), edge[1].get<std::string>());
      }
      idx.relations.push_back(std::move(rel));
    }
    for (const auto& [var, value] : doc.at("input").items()) {
      idx.input.bind(var, value.get<std::string>());
    }
    for (const auto& [var, value] : doc.at("snapshot").items()) {
      idx.snapshot.bind(var, value.get<std::string>());
    }
    return idx;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(origin + ": " + std::string(e.what()));
  }
}

}  // namespace idx
