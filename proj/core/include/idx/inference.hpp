#pragma once

#include <vector>

#include "idx/model.hpp"

namespace idx {

// Posterior of x under a. Bound variables yield a point mass. Unbound
// classifications are scored by their naive-Bayes factor with every child
// fixed: bound children at their assigned value, unbound classification
// children at their decided value (decided on demand, memoized per call).
// Throws DataError on unknown variables/values, unbound observations
// ("incomplete input") and all-zero score vectors ("degenerate distribution").
PosteriorDistribution posterior(const Classifier& c, const Assignment& a, const std::string& x);

// argmax of posterior; ties resolved to the first maximal value in domain
// order. Pure function of (c, a, x).
std::string decide(const Classifier& c, const Assignment& a, const std::string& x);

// Extends a with decided values for every classification, in an order where
// children are decided before their parents.
Assignment predict_all(const Classifier& c, const Assignment& a);

// a with x bound to value; x may be a previously unbound classification, in
// which case the value acts as clamped evidence from then on.
Assignment modified_input(const Classifier& c, const Assignment& a, const std::string& x,
                          const std::string& value);

namespace detail {

enum class LogMode { Auto, Never, Always };  // Auto: log space above 20 factors

// Unnormalized naive-Bayes scores for y given fixed child values (indices
// into each child's domain, in children(y) order).
std::vector<double> local_scores(const Classifier& c, int y, const std::vector<int>& child_values,
                                 LogMode mode = LogMode::Auto);

// Normalizes in place; throws DataError("degenerate distribution ...") if all
// scores are zero.
void normalize_scores(const Classifier& c, int y, std::vector<double>& scores);

// First maximal index.
int argmax_index(const std::vector<double>& probs);

// Assignment as per-variable value indices (-1 unbound) plus bound flags.
// Validates names, values and observation completeness.
struct IndexedAssignment {
  std::vector<int> values;
  std::vector<char> bound;
};
IndexedAssignment index_assignment(const Classifier& c, const Assignment& a);

// Per-call chain state: assignment converted to value indices plus a memo of
// on-demand decisions. No shared mutable state; safe to use from parallel
// callers each owning their own instance.
class Chain {
public:
  Chain(const Classifier& c, const Assignment& a, LogMode mode = LogMode::Auto);
  Chain(const Classifier& c, IndexedAssignment ia, LogMode mode = LogMode::Auto);

  // Value index of v: its bound value, or its decided value (memoized).
  int value_of(int v);
  bool is_bound(int v) const { return bound_[v]; }
  PosteriorDistribution distribution(int v);
  // Posterior probability of one value of v (1 or 0 for bound variables).
  double probability(int v, int value_idx);

private:
  std::vector<double> posterior_probs(int v);

  const Classifier& c_;
  std::vector<int> val_;     // bound or memoized decision, -1 otherwise
  std::vector<char> bound_;  // bound in the original assignment
  LogMode mode_;
};

}  // namespace detail
}  // namespace idx
