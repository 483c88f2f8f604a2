#include "support/oracle.hpp"

#include <stdexcept>

#include "idx/errors.hpp"

namespace oracle {

using idx::Assignment;
using idx::Classifier;

namespace {

int value_index(const Classifier& c, int v, const std::string& value) {
  int idx = c.variable(v).domain.index_of(value);
  if (idx < 0) throw std::runtime_error("oracle: unknown value " + value);
  return idx;
}

// prior(y) * prod over children of P(child | y), all values given by `vals`.
long double factor(const Classifier& c, int y, const std::vector<int>& vals) {
  long double f = c.prior(y, vals[y]);
  for (int ch : c.children(y)) f *= c.conditional(y, ch, vals[ch], vals[y]);
  return f;
}

}  // namespace

std::vector<double> joint_posterior(const Classifier& c, const Assignment& a,
                                    const std::string& x) {
  const int n = static_cast<int>(c.variable_count());
  const int xi = c.require_index(x);

  std::vector<int> vals(n, -1);
  std::vector<int> free;
  for (int v = 0; v < n; ++v) {
    const auto& name = c.variable(v).name;
    if (a.binds(name)) {
      vals[v] = value_index(c, v, a.at(name));
    } else {
      if (c.is_observation(v)) throw std::runtime_error("oracle: free observation " + name);
      free.push_back(v);
    }
  }

  std::vector<long double> mass(c.variable(xi).domain.size(), 0.0L);
  // Odometer over the free classifications; bound ones are clamped evidence.
  std::vector<std::size_t> digit(free.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < free.size(); ++i) vals[free[i]] = static_cast<int>(digit[i]);
    long double w = 1.0L;
    for (int y : c.classifications()) {
      if (vals[y] < 0) throw std::runtime_error("oracle: unset classification");
      if (!a.binds(c.variable(y).name)) w *= factor(c, y, vals);
    }
    mass[vals[xi]] += w;

    std::size_t k = 0;
    for (; k < free.size(); ++k) {
      if (++digit[k] < c.variable(free[k]).domain.size()) break;
      digit[k] = 0;
    }
    if (k == free.size()) break;
  }
  if (free.empty()) {
    // x itself was bound: point mass.
    std::vector<double> point(mass.size(), 0.0);
    point[vals[xi]] = 1.0;
    return point;
  }

  long double total = 0.0L;
  for (long double m : mass) total += m;
  if (total <= 0.0L) throw std::runtime_error("oracle: zero joint mass");
  std::vector<double> probs(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) probs[i] = static_cast<double>(mass[i] / total);
  return probs;
}

std::vector<double> chain_posterior(const Classifier& c, const Assignment& a,
                                    const std::string& x) {
  const int xi = c.require_index(x);
  const auto& dom = c.variable(xi).domain;
  if (a.binds(x)) {
    std::vector<double> point(dom.size(), 0.0);
    point[value_index(c, xi, a.at(x))] = 1.0;
    return point;
  }
  if (c.is_observation(xi)) throw std::runtime_error("oracle: unbound observation " + x);

  std::vector<long double> scores(dom.size());
  for (std::size_t v = 0; v < dom.size(); ++v) {
    long double s = c.prior(xi, v);
    for (int ch : c.children(xi)) {
      const auto& ch_name = c.variable(ch).name;
      std::string ch_value =
          a.binds(ch_name) ? a.at(ch_name) : chain_decide(c, a, ch_name);
      s *= c.conditional(xi, ch, value_index(c, ch, ch_value), static_cast<int>(v));
    }
    scores[v] = s;
  }
  long double total = 0.0L;
  for (long double s : scores) total += s;
  if (total <= 0.0L) throw std::runtime_error("oracle: degenerate scores for " + x);
  std::vector<double> probs(dom.size());
  for (std::size_t v = 0; v < dom.size(); ++v) probs[v] = static_cast<double>(scores[v] / total);
  return probs;
}

std::string chain_decide(const Classifier& c, const Assignment& a, const std::string& x) {
  std::vector<double> probs = chain_posterior(c, a, x);
  std::size_t best = 0;
  for (std::size_t v = 1; v < probs.size(); ++v) {
    if (probs[v] > probs[best]) best = v;
  }
  return c.variable(c.require_index(x)).domain.value(best);
}

}  // namespace oracle
