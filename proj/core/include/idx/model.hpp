#pragma once

#include <map>
#include <string>
#include <vector>

namespace idx {

enum class VarRole { Observation, Classification };

// Ordered set of categorical values. The order is fixed at construction and
// doubles as the argmax tie-break order.
class Domain {
public:
  Domain() = default;
  explicit Domain(std::vector<std::string> values);

  std::size_t size() const { return values_.size(); }
  const std::string& value(std::size_t i) const { return values_[i]; }
  const std::vector<std::string>& values() const { return values_; }
  int index_of(const std::string& value) const;  // -1 if absent
  bool contains(const std::string& value) const { return index_of(value) >= 0; }

private:
  std::vector<std::string> values_;
};

// Partial mapping from variable names to value labels. Kept ordered so that
// fingerprints and serialized forms are deterministic.
class Assignment {
public:
  Assignment() = default;

  Assignment& bind(const std::string& var, const std::string& value) {
    values_[var] = value;
    return *this;
  }
  Assignment& unbind(const std::string& var) {
    values_.erase(var);
    return *this;
  }
  bool binds(const std::string& var) const { return values_.count(var) > 0; }
  const std::string& at(const std::string& var) const;
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::map<std::string, std::string>& entries() const { return values_; }

  bool operator==(const Assignment& other) const { return values_ == other.values_; }

private:
  std::map<std::string, std::string> values_;
};

struct PosteriorDistribution {
  std::string variable;
  std::vector<std::string> values;  // domain order
  std::vector<double> probs;        // normalized, same order

  double prob_of(const std::string& value) const;
  // First maximal value in domain order.
  const std::string& argmax() const;
  int argmax_index() const;
};

// Discrete Bayesian network classifier: observations and classifications with
// finite domains, a dependency DAG whose edges run parent -> child, a prior
// per variable, and one conditional table P(child | parent) per edge. Each
// classification is scored by a naive-Bayes factor over its children in the
// DAG. Immutable after build(); all inference state is per-call.
class Classifier {
public:
  struct Variable {
    std::string name;
    VarRole role;
    Domain domain;
  };

  std::size_t variable_count() const { return vars_.size(); }
  const Variable& variable(std::size_t i) const { return vars_[i]; }
  int index_of(const std::string& name) const;       // -1 if absent
  int require_index(const std::string& name) const;  // throws DataError

  const std::vector<int>& observations() const { return observations_; }
  const std::vector<int>& classifications() const { return classifications_; }
  bool is_observation(int v) const { return vars_[v].role == VarRole::Observation; }

  // Dependency edges (parent, child), sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  bool has_edge(int parent, int child) const;

  const std::vector<double>& priors(int v) const { return priors_[v]; }
  double prior(int v, int value_idx) const { return priors_[v][value_idx]; }
  // P(child = child_val | parent = parent_val) for a dependency edge.
  double conditional(int parent, int child, int child_val, int parent_val) const;
  const std::vector<double>& conditional_table(int parent, int child) const;

  // Classifications ordered so that every classification appears after all
  // classifications among its children (prediction order).
  const std::vector<int>& decision_order() const { return decision_order_; }

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
  friend class ClassifierBuilder;
  Classifier() = default;

  std::vector<Variable> vars_;
  std::map<std::string, int> index_;
  std::vector<int> observations_;
  std::vector<int> classifications_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<double>> priors_;
  // Keyed by (parent, child); table[child_val * |V(parent)| + parent_val].
  std::map<std::pair<int, int>, std::vector<double>> conditionals_;
  std::vector<int> decision_order_;
  std::vector<std::string> warnings_;
};

class ClassifierBuilder {
public:
  ClassifierBuilder& add_variable(const std::string& name, VarRole role,
                                  std::vector<std::string> domain);
  ClassifierBuilder& add_edge(const std::string& parent, const std::string& child);
  ClassifierBuilder& set_priors(const std::string& var, std::vector<double> priors);
  // rows[child_val][parent_val] = P(child = child_val | parent = parent_val)
  ClassifierBuilder& set_conditional(const std::string& parent, const std::string& child,
                                     std::vector<std::vector<double>> rows);
  ClassifierBuilder& add_warning(std::string w);

  // Validates: unique names, domains >= 2 values, edges with classification
  // parents only, acyclicity, priors and conditional columns normalized to
  // 1 +/- 1e-9, a table for every edge and nothing else.
  Classifier build();

private:
  Classifier c_;
  bool built_ = false;
};

}  // namespace idx
