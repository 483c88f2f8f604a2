#include "idx/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idx/errors.hpp"

namespace idx {
namespace detail {

std::vector<double> local_scores(const Classifier& c, int y, const std::vector<int>& child_values,
                                 LogMode mode) {
  const auto& children = c.children(y);
  const std::size_t k = c.variable(y).domain.size();
  const std::size_t factors = 1 + children.size();
  const bool use_log = mode == LogMode::Always || (mode == LogMode::Auto && factors > 20);

  std::vector<double> scores(k, 0.0);
  if (!use_log) {
    for (std::size_t i = 0; i < k; ++i) {
      double s = c.prior(y, static_cast<int>(i));
      for (std::size_t j = 0; j < children.size(); ++j) {
        s *= c.conditional(y, children[j], child_values[j], static_cast<int>(i));
      }
      scores[i] = s;
    }
    return scores;
  }

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(k, 0.0);
  double max_log = kNegInf;
  for (std::size_t i = 0; i < k; ++i) {
    double s = c.prior(y, static_cast<int>(i));
    double l = s > 0 ? std::log(s) : kNegInf;
    for (std::size_t j = 0; j < children.size() && l != kNegInf; ++j) {
      double f = c.conditional(y, children[j], child_values[j], static_cast<int>(i));
      l = f > 0 ? l + std::log(f) : kNegInf;
    }
    logs[i] = l;
    max_log = std::max(max_log, l);
  }
  if (max_log == kNegInf) return scores;  // all zero; caller reports degeneracy
  for (std::size_t i = 0; i < k; ++i) {
    scores[i] = logs[i] == kNegInf ? 0.0 : std::exp(logs[i] - max_log);
  }
  return scores;
}

void normalize_scores(const Classifier& c, int y, std::vector<double>& scores) {
  double sum = 0;
  for (double s : scores) sum += s;
  if (sum <= 0) {
    throw DataError("degenerate distribution for variable '" + c.variable(y).name + "'");
  }
  for (double& s : scores) s /= sum;
}

int argmax_index(const std::vector<double>& probs) {
  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  }
  return best;
}

IndexedAssignment index_assignment(const Classifier& c, const Assignment& a) {
  IndexedAssignment ia;
  ia.values.assign(c.variable_count(), -1);
  ia.bound.assign(c.variable_count(), 0);
  for (const auto& [name, value] : a.entries()) {
    int v = c.index_of(name);
    if (v < 0) throw DataError("unknown variable: " + name);
    int idx = c.variable(v).domain.index_of(value);
    if (idx < 0) {
      throw DataError("unknown value '" + value + "' for variable '" + name + "'");
    }
    ia.values[v] = idx;
    ia.bound[v] = 1;
  }
  for (int o : c.observations()) {
    if (!ia.bound[o]) {
      throw DataError("incomplete input: observation '" + c.variable(o).name + "' is unbound");
    }
  }
  return ia;
}

Chain::Chain(const Classifier& c, const Assignment& a, LogMode mode)
    : Chain(c, index_assignment(c, a), mode) {}

Chain::Chain(const Classifier& c, IndexedAssignment ia, LogMode mode)
    : c_(c), val_(std::move(ia.values)), bound_(std::move(ia.bound)), mode_(mode) {}

std::vector<double> Chain::posterior_probs(int v) {
  const auto& dom = c_.variable(v).domain;
  if (bound_[v]) {
    std::vector<double> probs(dom.size(), 0.0);
    probs[val_[v]] = 1.0;
    return probs;
  }
  const auto& children = c_.children(v);
  std::vector<int> child_values(children.size());
  for (std::size_t j = 0; j < children.size(); ++j) child_values[j] = value_of(children[j]);
  auto scores = local_scores(c_, v, child_values, mode_);
  normalize_scores(c_, v, scores);
  return scores;
}

int Chain::value_of(int v) {
  if (val_[v] >= 0) return val_[v];
  auto probs = posterior_probs(v);
  val_[v] = argmax_index(probs);
  return val_[v];
}

double Chain::probability(int v, int value_idx) {
  return posterior_probs(v)[value_idx];
}

PosteriorDistribution Chain::distribution(int v) {
  PosteriorDistribution d;
  d.variable = c_.variable(v).name;
  d.values = c_.variable(v).domain.values();
  d.probs = posterior_probs(v);
  return d;
}

}  // namespace detail

PosteriorDistribution posterior(const Classifier& c, const Assignment& a, const std::string& x) {
  detail::Chain chain(c, a);
  return chain.distribution(c.require_index(x));
}

std::string decide(const Classifier& c, const Assignment& a, const std::string& x) {
  detail::Chain chain(c, a);
  int v = c.require_index(x);
  return c.variable(v).domain.value(chain.value_of(v));
}

Assignment predict_all(const Classifier& c, const Assignment& a) {
  detail::Chain chain(c, a);
  Assignment out = a;
  for (int v : c.decision_order()) {
    out.bind(c.variable(v).name, c.variable(v).domain.value(chain.value_of(v)));
  }
  return out;
}

Assignment modified_input(const Classifier& c, const Assignment& a, const std::string& x,
                          const std::string& value) {
  int v = c.require_index(x);
  if (c.variable(v).domain.index_of(value) < 0) {
    throw DataError("unknown value '" + value + "' for variable '" + x + "'");
  }
  Assignment out = a;
  out.bind(x, value);
  return out;
}

}  // namespace idx
