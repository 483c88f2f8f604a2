#include "idx/model_json.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "idx/errors.hpp"

namespace idx {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr const char* kFormat = "bc/1";

std::string role_name(VarRole role) {
  return role == VarRole::Observation ? "observation" : "classification";
}

VarRole parse_role(const std::string& s) {
  if (s == "observation") return VarRole::Observation;
  if (s == "classification") return VarRole::Classification;
  throw DataError("unknown variable role: " + s);
}

}  // namespace

std::string to_json(const Classifier& c, int indent) {
  ordered doc;
  doc["format"] = kFormat;

  ordered vars = ordered::array();
  for (std::size_t v = 0; v < c.variable_count(); ++v) {
    const auto& var = c.variable(v);
    ordered item;
    item["name"] = var.name;
    item["role"] = role_name(var.role);
    item["domain"] = var.domain.values();
    vars.push_back(std::move(item));
  }
  doc["variables"] = std::move(vars);

  ordered edges = ordered::array();
  for (auto [p, ch] : c.edges()) {
    edges.push_back(ordered::array({c.variable(p).name, c.variable(ch).name}));
  }
  doc["edges"] = std::move(edges);

  ordered priors;
  for (std::size_t v = 0; v < c.variable_count(); ++v) {
    const auto& var = c.variable(v);
    ordered row;
    for (std::size_t i = 0; i < var.domain.size(); ++i) {
      row[var.domain.value(i)] = c.prior(static_cast<int>(v), static_cast<int>(i));
    }
    priors[var.name] = std::move(row);
  }
  doc["priors"] = std::move(priors);

  ordered conds;
  for (auto [p, ch] : c.edges()) {
    const auto& pd = c.variable(p).domain;
    const auto& cd = c.variable(ch).domain;
    ordered& per_child = conds[c.variable(ch).name];
    for (std::size_t i = 0; i < cd.size(); ++i) {
      ordered& per_value = per_child[cd.value(i)];
      ordered row;
      for (std::size_t m = 0; m < pd.size(); ++m) {
        row[pd.value(m)] =
            c.conditional(p, ch, static_cast<int>(i), static_cast<int>(m));
      }
      per_value[c.variable(p).name] = std::move(row);
    }
  }
  doc["conditionals"] = std::move(conds);

  if (!c.warnings().empty()) doc["warnings"] = c.warnings();

  return doc.dump(indent) + "\n";
}

Classifier classifier_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormat) {
      throw DataError("model document missing format tag '" + std::string(kFormat) + "'");
    }
    ClassifierBuilder b;
    for (const auto& item : doc.at("variables")) {
      b.add_variable(item.at("name").get<std::string>(),
                     parse_role(item.at("role").get<std::string>()),
                     item.at("domain").get<std::vector<std::string>>());
    }
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw DataError("edge must be a [parent, child] pair");
      b.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }

    // Domain order comes from "variables"; the prior/conditional objects are
    // keyed by value label.
    std::map<std::string, std::vector<std::string>> domains;
    std::map<std::string, std::string> roles;
    for (const auto& item : doc.at("variables")) {
      domains[item.at("name").get<std::string>()] =
          item.at("domain").get<std::vector<std::string>>();
    }

    const auto& priors = doc.at("priors");
    for (const auto& [name, dom] : domains) {
      if (!priors.contains(name)) throw DataError("priors missing for variable " + name);
      std::vector<double> row;
      row.reserve(dom.size());
      for (const auto& value : dom) row.push_back(priors.at(name).at(value).get<double>());
      b.set_priors(name, std::move(row));
    }

    if (doc.contains("conditionals")) {
      const auto& conds = doc.at("conditionals");
      for (const auto& e : doc.at("edges")) {
        const std::string parent = e.at(0).get<std::string>();
        const std::string child = e.at(1).get<std::string>();
        const auto& pd = domains.at(parent);
        const auto& cd = domains.at(child);
        std::vector<std::vector<double>> rows;
        rows.reserve(cd.size());
        for (const auto& cv : cd) {
          std::vector<double> row;
          row.reserve(pd.size());
          for (const auto& pv : pd) {
            row.push_back(conds.at(child).at(cv).at(parent).at(pv).get<double>());
          }
          rows.push_back(std::move(row));
        }
        b.set_conditional(parent, child, std::move(rows));
      }
    }

    if (doc.contains("warnings")) {
      for (const auto& w : doc.at("warnings")) b.add_warning(w.get<std::string>());
    }
    return b.build();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

void save_classifier(const Classifier& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << to_json(c);
}

Classifier load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return classifier_from_json(ss.str());
}

}  // namespace idx
