#include "idx/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "idx/errors.hpp"

namespace idx {

Domain::Domain(std::vector<std::string> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw DataError("domain needs at least 2 values");
  std::set<std::string> seen;
  for (const auto& v : values_) {
    if (v.empty()) throw DataError("empty domain value");
    if (!seen.insert(v).second) throw DataError("duplicate domain value: " + v);
  }
}

int Domain::index_of(const std::string& value) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == value) return static_cast<int>(i);
  }
  return -1;
}

const std::string& Assignment::at(const std::string& var) const {
  auto it = values_.find(var);
  if (it == values_.end()) throw DataError("unknown variable in assignment lookup: " + var);
  return it->second;
}

double PosteriorDistribution::prob_of(const std::string& value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return probs[i];
  }
  throw DataError("value '" + value + "' not in posterior over " + variable);
}

int PosteriorDistribution::argmax_index() const {
  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  }
  return best;
}

const std::string& PosteriorDistribution::argmax() const { return values[argmax_index()]; }

int Classifier::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int Classifier::require_index(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw DataError("unknown variable: " + name);
  return i;
}

bool Classifier::has_edge(int parent, int child) const {
  return conditionals_.count({parent, child}) > 0;
}

const std::vector<double>& Classifier::conditional_table(int parent, int child) const {
  auto it = conditionals_.find({parent, child});
  if (it == conditionals_.end()) {
    throw DataError("no dependency edge " + vars_[parent].name + " -> " + vars_[child].name);
  }
  return it->second;
}

double Classifier::conditional(int parent, int child, int child_val, int parent_val) const {
  const auto& table = conditional_table(parent, child);
  return table[static_cast<std::size_t>(child_val) * vars_[parent].domain.size() + parent_val];
}

ClassifierBuilder& ClassifierBuilder::add_variable(const std::string& name, VarRole role,
                                                   std::vector<std::string> domain) {
  if (name.empty()) throw DataError("variable name must be non-empty");
  if (c_.index_.count(name)) throw DataError("duplicate variable: " + name);
  c_.index_[name] = static_cast<int>(c_.vars_.size());
  c_.vars_.push_back({name, role, Domain(std::move(domain))});
  return *this;
}

ClassifierBuilder& ClassifierBuilder::add_edge(const std::string& parent, const std::string& child) {
  int p = c_.index_of(parent);
  int ch = c_.index_of(child);
  if (p < 0) throw DataError("unknown variable: " + parent);
  if (ch < 0) throw DataError("unknown variable: " + child);
  if (p == ch) throw DataError("self-edge on " + parent);
  if (c_.vars_[p].role == VarRole::Observation) {
    throw DataError("observation '" + parent + "' cannot be a parent in the dependency graph");
  }
  auto e = std::make_pair(p, ch);
  if (std::find(c_.edges_.begin(), c_.edges_.end(), e) != c_.edges_.end()) {
    throw DataError("duplicate edge " + parent + " -> " + child);
  }
  c_.edges_.push_back(e);
  return *this;
}

ClassifierBuilder& ClassifierBuilder::set_priors(const std::string& var, std::vector<double> priors) {
  int v = c_.index_of(var);
  if (v < 0) throw DataError("unknown variable: " + var);
  if (c_.priors_.empty()) c_.priors_.resize(c_.vars_.size());
  if (c_.priors_.size() < c_.vars_.size()) c_.priors_.resize(c_.vars_.size());
  c_.priors_[v] = std::move(priors);
  return *this;
}

ClassifierBuilder& ClassifierBuilder::set_conditional(const std::string& parent,
                                                      const std::string& child,
                                                      std::vector<std::vector<double>> rows) {
  int p = c_.index_of(parent);
  int ch = c_.index_of(child);
  if (p < 0) throw DataError("unknown variable: " + parent);
  if (ch < 0) throw DataError("unknown variable: " + child);
  const auto& pd = c_.vars_[p].domain;
  const auto& cd = c_.vars_[ch].domain;
  if (rows.size() != cd.size()) {
    throw DataError("conditional " + child + "|" + parent + " has wrong number of value rows");
  }
  std::vector<double> flat;
  flat.reserve(cd.size() * pd.size());
  for (const auto& row : rows) {
    if (row.size() != pd.size()) {
      throw DataError("conditional " + child + "|" + parent + " has wrong row width");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  c_.conditionals_[{p, ch}] = std::move(flat);
  return *this;
}

ClassifierBuilder& ClassifierBuilder::add_warning(std::string w) {
  c_.warnings_.push_back(std::move(w));
  return *this;
}

Classifier ClassifierBuilder::build() {
  if (built_) throw UsageError("build() called twice");
  built_ = true;

  if (c_.vars_.empty()) throw DataError("classifier needs at least one variable");
  const std::size_t n = c_.vars_.size();

  for (std::size_t v = 0; v < n; ++v) {
    if (c_.vars_[v].role == VarRole::Observation) c_.observations_.push_back(static_cast<int>(v));
    else c_.classifications_.push_back(static_cast<int>(v));
  }

  std::sort(c_.edges_.begin(), c_.edges_.end());
  c_.children_.assign(n, {});
  for (auto [p, ch] : c_.edges_) {
    if (c_.vars_[p].role != VarRole::Classification) {
      throw DataError("observation '" + c_.vars_[p].name +
                      "' cannot be a parent in the dependency graph");
    }
    c_.children_[p].push_back(ch);
  }

  // Kahn's algorithm over parent -> child edges.
  {
    std::vector<int> indegree(n, 0);
    for (auto [p, ch] : c_.edges_) {
      (void)p;
      ++indegree[ch];
    }
    std::vector<int> queue;
    for (std::size_t v = 0; v < n; ++v) {
      if (indegree[v] == 0) queue.push_back(static_cast<int>(v));
    }
    std::size_t done = 0;
    while (done < queue.size()) {
      int v = queue[done++];
      for (int ch : c_.children_[v]) {
        if (--indegree[ch] == 0) queue.push_back(ch);
      }
    }
    if (done != n) throw DataError("dependency graph has a cycle");
  }

  if (c_.priors_.size() != n) c_.priors_.resize(n);
  constexpr double kTol = 1e-9;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& var = c_.vars_[v];
    const auto& pr = c_.priors_[v];
    if (pr.size() != var.domain.size()) {
      throw DataError("priors for " + var.name + " missing or wrong length");
    }
    double sum = 0;
    for (double p : pr) {
      if (!(p >= 0.0) || p > 1.0 + kTol) throw DataError("prior out of range for " + var.name);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kTol) throw DataError("priors for " + var.name + " do not sum to 1");
  }

  for (const auto& [edge, table] : c_.conditionals_) {
    auto [p, ch] = edge;
    if (std::find(c_.edges_.begin(), c_.edges_.end(), edge) == c_.edges_.end()) {
      throw DataError("conditional table for missing edge " + c_.vars_[p].name + " -> " +
                      c_.vars_[ch].name);
    }
    const std::size_t pn = c_.vars_[p].domain.size();
    const std::size_t cn = c_.vars_[ch].domain.size();
    for (std::size_t m = 0; m < pn; ++m) {
      double sum = 0;
      for (std::size_t i = 0; i < cn; ++i) {
        double val = table[i * pn + m];
        if (!(val >= 0.0) || val > 1.0 + kTol) {
          throw DataError("conditional out of range for " + c_.vars_[ch].name + "|" +
                          c_.vars_[p].name);
        }
        sum += val;
      }
      if (std::abs(sum - 1.0) > kTol) {
        throw DataError("conditional column for " + c_.vars_[ch].name + "|" + c_.vars_[p].name +
                        "=" + c_.vars_[p].domain.value(m) + " does not sum to 1");
      }
    }
  }
  for (auto e : c_.edges_) {
    if (!c_.conditionals_.count(e)) {
      throw DataError("missing conditional table for edge " + c_.vars_[e.first].name + " -> " +
                      c_.vars_[e.second].name);
    }
  }

  // Decision order: a classification comes after every classification among
  // its children (their decisions feed its factor).
  {
    std::vector<char> mark(n, 0);  // 1 = visiting, 2 = done
    std::vector<int> order;
    auto dfs = [&](auto&& self, int v) -> void {
      mark[v] = 1;
      for (int ch : c_.children_[v]) {
        if (c_.vars_[ch].role != VarRole::Classification) continue;
        if (mark[ch] == 0) self(self, ch);
      }
      mark[v] = 2;
      order.push_back(v);
    };
    for (int v : c_.classifications_) {
      if (mark[v] == 0) dfs(dfs, v);
    }
    c_.decision_order_ = std::move(order);
  }

  return std::move(c_);
}

}  // namespace idx
