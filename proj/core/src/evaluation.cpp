#include "idx/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <set>
#include <thread>
#include <tuple>
#include <utility>

#include "idx/errors.hpp"
#include "idx/explanation.hpp"
#include "idx/inference.hpp"
#include "idx/rng.hpp"

namespace idx {

namespace {

InfluenceGraph kit_graph(const Classifier& c, const ExplanationKit& kit) {
  return kit.graph_kind() == GraphKind::Full ? influences(c)
                                             : io_influences(c, kit.outputs());
}

void require_instances(const std::vector<Assignment>& instances) {
  if (instances.empty()) throw UsageError("at least one instance is required");
}

// Runs fn(0..n-1) on up to `jobs` threads. Callers write results into
// per-index slots and reduce sequentially, so the job count never changes
// the report.
void parallel_for(unsigned jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

PrevalenceReport prevalence(const Classifier& c, const ExplanationKit& kit,
                            const std::vector<Assignment>& instances, unsigned jobs) {
  require_instances(instances);
  const InfluenceGraph g = kit_graph(c, kit);
  if (g.edge_count() == 0) throw UsageError("the influence graph has no edges");

  PrevalenceReport report;
  report.kit = kit.name();
  report.instance_count = instances.size();
  report.influence_count = g.edge_count();
  report.rows.resize(kit.type_count());
  for (std::size_t t = 0; t < kit.type_count(); ++t) report.rows[t].label = kit.type(t).label;

  const std::size_t nt = kit.type_count();
  std::vector<std::vector<std::size_t>> counts(instances.size(), std::vector<std::size_t>(nt, 0));
  std::vector<std::vector<std::size_t>> class_counts(instances.size(),
                                                     std::vector<std::size_t>(nt, 0));
  parallel_for(jobs, instances.size(), [&](std::size_t i) {
    for (std::size_t t = 0; t < nt; ++t) {
      for (const auto& edge : g.edges()) {
        if (!kit.holds(t, edge, instances[i])) continue;
        ++counts[i][t];
        if (!c.is_observation(edge.source) && !c.is_observation(edge.target)) {
          ++class_counts[i][t];
        }
      }
    }
  });
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t t = 0; t < nt; ++t) {
      report.rows[t].pct += 100.0 * static_cast<double>(counts[i][t]) / g.edge_count();
      report.rows[t].class_pct +=
          100.0 * static_cast<double>(class_counts[i][t]) / g.edge_count();
    }
  }
  for (auto& row : report.rows) {
    row.pct /= static_cast<double>(instances.size());
    row.class_pct /= static_cast<double>(instances.size());
  }
  return report;
}

namespace {

// The polarities this kit can express among `common`, for one edge: which of
// them hold. Edges outside the kit's own influence graph hold nothing.
std::set<RelationType::Polarity> edge_signature(
    const Classifier&, const ExplanationKit& kit, const InfluenceGraph& own_graph,
    const std::set<RelationType::Polarity>& common, const InfluenceEdge& edge,
    const Assignment& a) {
  std::set<RelationType::Polarity> sig;
  if (!own_graph.has_edge(edge.source, edge.target)) return sig;
  for (std::size_t t = 0; t < kit.type_count(); ++t) {
    const auto polarity = kit.type(t).polarity;
    if (!common.count(polarity)) continue;
    if (kit.holds(t, edge, a)) sig.insert(polarity);
  }
  return sig;
}

std::set<RelationType::Polarity> dialectical_polarities(const ExplanationKit& kit) {
  std::set<RelationType::Polarity> out;
  for (std::size_t t = 0; t < kit.type_count(); ++t) {
    if (kit.type(t).polarity != RelationType::Polarity::Neutral) out.insert(kit.type(t).polarity);
  }
  return out;
}

}  // namespace

AgreementReport agreement(const Classifier& c, const ExplanationKit& kit_a,
                          const ExplanationKit& kit_b, const std::vector<std::string>& outputs,
                          const std::vector<Assignment>& instances, unsigned jobs) {
  require_instances(instances);
  auto pol_a = dialectical_polarities(kit_a);
  auto pol_b = dialectical_polarities(kit_b);
  std::set<RelationType::Polarity> common;
  for (auto p : pol_a) {
    if (pol_b.count(p)) common.insert(p);
  }
  if (common.empty()) {
    throw UsageError("kits '" + kit_a.name() + "' and '" + kit_b.name() +
                     "' share no relation types of matching polarity");
  }

  const InfluenceGraph io = io_influences(c, outputs);
  const InfluenceGraph graph_a = kit_graph(c, kit_a);
  const InfluenceGraph graph_b = kit_graph(c, kit_b);

  AgreementReport report;
  report.kit_a = kit_a.name();
  report.kit_b = kit_b.name();
  report.instance_count = instances.size();
  report.edge_count = io.edge_count();

  std::vector<std::size_t> agree(instances.size(), 0);
  parallel_for(jobs, instances.size(), [&](std::size_t i) {
    for (const auto& edge : io.edges()) {
      auto sig_a = edge_signature(c, kit_a, graph_a, common, edge, instances[i]);
      auto sig_b = edge_signature(c, kit_b, graph_b, common, edge, instances[i]);
      if (sig_a == sig_b) ++agree[i];
    }
  });
  for (std::size_t i = 0; i < instances.size(); ++i) {
    report.pct += 100.0 * static_cast<double>(agree[i]) / io.edge_count();
  }
  report.pct /= static_cast<double>(instances.size());
  return report;
}

namespace {

// One Property 1 check: does every single change of x keep the posterior of
// y's decided value moving strictly the right way?
bool violates_monotonicity(const Classifier& c, const detail::IndexedAssignment& ia,
                           const InfluenceEdge& edge, bool attack, bool clamp_others) {
  const int x = edge.source;
  const int y = edge.target;
  detail::Chain base_chain(c, ia);
  const int sigma_y = base_chain.value_of(y);
  const double base = base_chain.probability(y, sigma_y);

  auto modified = ia;
  if (clamp_others) {
    for (int z : c.children(y)) {
      modified.values[z] = base_chain.value_of(z);
      modified.bound[z] = 1;
    }
  }
  const int x_current = base_chain.value_of(x);
  const int x_count = static_cast<int>(c.variable(x).domain.size());
  for (int k = 0; k < x_count; ++k) {
    if (k == x_current) continue;
    auto changed = modified;
    changed.values[x] = k;
    changed.bound[x] = 1;
    detail::Chain chain(c, changed);
    const double p = chain.probability(y, sigma_y);
    if (attack ? !(p > base) : !(p < base)) return true;
  }
  return false;
}

}  // namespace

MonotonicityReport monotonicity_violations(const Classifier& c, const ExplanationKit& kit,
                                           const std::vector<Assignment>& instances,
                                           std::size_t sample_size, std::uint64_t seed,
                                           unsigned jobs) {
  require_instances(instances);
  std::vector<std::size_t> dialectical;
  for (std::size_t t = 0; t < kit.type_count(); ++t) {
    if (kit.type(t).polarity != RelationType::Polarity::Neutral) dialectical.push_back(t);
  }
  if (dialectical.empty()) {
    throw UsageError("kit '" + kit.name() + "' has no dialectical relation types");
  }
  const InfluenceGraph g = kit_graph(c, kit);
  if (g.edge_count() == 0) throw UsageError("the influence graph has no edges");

  struct Item {
    std::size_t instance;
    InfluenceEdge edge;
    bool attack;
  };
  std::vector<std::vector<Item>> found(instances.size());
  parallel_for(jobs, instances.size(), [&](std::size_t i) {
    for (const auto& edge : g.edges()) {
      for (std::size_t t : dialectical) {
        if (!kit.holds(t, edge, instances[i])) continue;
        found[i].push_back(
            {i, edge, kit.type(t).polarity == RelationType::Polarity::Attack});
      }
    }
  });
  std::vector<Item> population;
  for (auto& items : found) {
    population.insert(population.end(), items.begin(), items.end());
  }

  MonotonicityReport report;
  report.kit = kit.name();
  report.population = population.size();
  const std::size_t sampled = std::min(sample_size, population.size());
  if (sampled < population.size()) {
    Rng rng(derive_seed(seed, 0));
    for (std::size_t j = 0; j < sampled; ++j) {
      std::size_t pick = j + static_cast<std::size_t>(rng.next_below(population.size() - j));
      std::swap(population[j], population[pick]);
    }
    population.resize(sampled);
  }
  report.sampled = population.size();

  const bool clamp_others = kit.graph_kind() == GraphKind::Full;
  std::vector<detail::IndexedAssignment> indexed;
  indexed.reserve(instances.size());
  for (const auto& a : instances) indexed.push_back(detail::index_assignment(c, a));
  std::vector<char> flagged(population.size(), 0);
  parallel_for(jobs, population.size(), [&](std::size_t j) {
    const auto& item = population[j];
    flagged[j] = violates_monotonicity(c, indexed[item.instance], item.edge, item.attack,
                                       clamp_others);
  });
  for (char f : flagged) report.violations += f;
  report.rate = report.sampled == 0
                    ? 0.0
                    : static_cast<double>(report.violations) / static_cast<double>(report.sampled);
  return report;
}

ComplexityReport complexity_probe(const Classifier& c, const std::string& kit_name,
                                  const std::string& explanandum, const Assignment& a,
                                  std::uint64_t cf_budget) {
  if (kit_name != "md" && kit_name != "sd" && kit_name != "cf") {
    throw UsageError("complexity probe supports kits md, sd and cf");
  }
  KitOptions opts;
  opts.cf_budget = cf_budget;
  const ExplanationKit kit = make_kit(kit_name, c, opts);
  const InfluenceGraph g = influences(c);
  generate(c, g, kit, explanandum, a);

  ComplexityReport report;
  report.kit = kit_name;
  report.measured = kit.posterior_evaluations();

  // Influencer scopes expanded by generate: the explanandum and every
  // variable reachable from it through influence edges.
  std::vector<char> visited(c.variable_count(), 0);
  std::vector<int> stack = {c.require_index(explanandum)};
  visited[static_cast<std::size_t>(stack[0])] = 1;
  while (!stack.empty()) {
    int y = stack.back();
    stack.pop_back();
    for (int x : g.parents(y)) {
      if (!visited[x]) {
        visited[x] = 1;
        stack.push_back(x);
      }
    }
  }
  for (std::size_t v = 0; v < c.variable_count(); ++v) {
    if (!visited[v] || g.parents(static_cast<int>(v)).empty()) continue;
    std::uint64_t linear = 1;
    for (int x : g.parents(static_cast<int>(v))) {
      linear += static_cast<std::uint64_t>(c.variable(x).domain.size()) - 1;
    }
    report.linear_cost += linear;

    // Worlds the counterfactual kit enumerates for this scope: one per joint
    // value of the observations feeding its influencers.
    std::set<int> obs;
    std::vector<int> walk(c.children(static_cast<int>(v)).begin(),
                          c.children(static_cast<int>(v)).end());
    std::set<int> walked(walk.begin(), walk.end());
    while (!walk.empty()) {
      int z = walk.back();
      walk.pop_back();
      if (c.is_observation(z)) {
        obs.insert(z);
        continue;
      }
      for (int w : c.children(z)) {
        if (walked.insert(w).second) walk.push_back(w);
      }
    }
    std::uint64_t product = 1;
    for (int x : obs) product *= static_cast<std::uint64_t>(c.variable(x).domain.size());
    report.enumeration_size += product;
  }
  return report;
}

Classifier random_classifier(std::uint64_t seed, bool all_binary) {
  Rng rng(seed);
  const int n = 2 + static_cast<int>(rng.next_below(4));  // 2..5 variables
  const int max_class = std::min(n - 1, 3);
  const int n_class = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_class)));
  const int n_obs = n - n_class;
  const std::vector<std::string> value_pool = {"a", "b", "c", "d"};

  ClassifierBuilder builder;
  std::vector<std::string> class_names;
  std::vector<std::string> obs_names;
  std::vector<int> sizes;
  for (int i = 0; i < n_class; ++i) {
    class_names.push_back("c" + std::to_string(i));
    builder.add_variable(class_names.back(), VarRole::Classification,
                         {value_pool[0], value_pool[1]});
    sizes.push_back(2);
  }
  for (int i = 0; i < n_obs; ++i) {
    const int k = all_binary ? 2 : 2 + static_cast<int>(rng.next_below(3));
    obs_names.push_back("x" + std::to_string(i));
    builder.add_variable(obs_names.back(), VarRole::Observation,
                         std::vector<std::string>(value_pool.begin(), value_pool.begin() + k));
    sizes.push_back(k);
  }

  std::vector<std::pair<int, int>> edges;  // indices into the combined order above
  for (int i = 0; i < n_class; ++i) {
    for (int j = i + 1; j < n_class; ++j) {
      if (rng.next_double() < 0.5) edges.emplace_back(i, j);
    }
    for (int j = 0; j < n_obs; ++j) {
      if (rng.next_double() < 0.5) edges.emplace_back(i, n_class + j);
    }
  }
  if (edges.empty()) edges.emplace_back(0, n_class);  // guarantee one influence

  auto name_of = [&](int v) {
    return v < n_class ? class_names[v] : obs_names[v - n_class];
  };
  for (const auto& [p, ch] : edges) builder.add_edge(name_of(p), name_of(ch));

  auto random_distribution = [&](int k) {
    std::vector<double> d(k);
    double sum = 0;
    for (double& x : d) {
      x = rng.uniform(0.05, 1.0);
      sum += x;
    }
    for (double& x : d) x /= sum;
    return d;
  };
  for (int v = 0; v < n; ++v) builder.set_priors(name_of(v), random_distribution(sizes[v]));
  for (const auto& [p, ch] : edges) {
    std::vector<std::vector<double>> rows(sizes[ch], std::vector<double>(sizes[p], 0.0));
    for (int pv = 0; pv < sizes[p]; ++pv) {
      auto column = random_distribution(sizes[ch]);
      for (int cv = 0; cv < sizes[ch]; ++cv) rows[cv][pv] = column[cv];
    }
    builder.set_conditional(name_of(p), name_of(ch), rows);
  }
  return builder.build();
}

Assignment random_observation_assignment(const Classifier& c, std::uint64_t seed) {
  Rng rng(seed);
  Assignment a;
  for (int v : c.observations()) {
    const auto& domain = c.variable(v).domain;
    a.bind(c.variable(v).name, domain.value(rng.next_below(domain.size())));
  }
  return a;
}

PropositionReport check_propositions(std::uint64_t seed, std::size_t trials) {
  if (trials < 1) throw UsageError("at least one trial is required");
  PropositionReport report;
  report.trials = trials;

  for (std::size_t t = 0; t < trials; ++t) {
    const bool all_binary = t % 3 == 2;
    const Classifier c = random_classifier(derive_seed(seed, t, 1), all_binary);
    const Assignment a = random_observation_assignment(c, derive_seed(seed, t, 2));
    const InfluenceGraph g = influences(c);
    auto note = [&](const std::string& what, const InfluenceEdge& edge) {
      report.counterexamples.push_back(
          "trial " + std::to_string(t) + ": " + what + " on ('" +
          c.variable(edge.source).name + "', '" + c.variable(edge.target).name + "')");
    };

    for (const auto& edge : g.edges()) {
      const bool ma = md_attack(c, edge, a);
      const bool ms = md_support(c, edge, a);
      const bool sa = sd_attack(c, edge, a);
      const bool ss = sd_support(c, edge, a);
      if (ma && !sa) note("monotonic attack without stochastic attack", edge);
      if (ms && !ss) note("monotonic support without stochastic support", edge);
      if (c.variable(edge.source).domain.size() == 2) {
        if (ma != sa) note("binary influencer with differing attack predicates", edge);
        if (ms != ss) note("binary influencer with differing support predicates", edge);
      }
      // Critical influences are monotonic supports only where every
      // single-change world for the influencer is feasible: a chained
      // co-influencer can exclude wider alternatives from the critical test
      // while monotonic support still ranges over them. Feasibility of all
      // of them is guaranteed for flat scopes and for binary influencers.
      bool flat_scope = true;
      for (int z : g.parents(edge.target)) {
        if (!c.is_observation(z)) flat_scope = false;
      }
      const bool binary_influencer = c.variable(edge.source).domain.size() == 2;
      if ((flat_scope || binary_influencer) && cf_critical(c, edge, a) && !ms) {
        note("critical influence that is not a monotonic support", edge);
      }
    }

    // The full and io graphs coincide exactly when the dependencies are all
    // class-to-observation pairs and nothing else.
    std::vector<std::string> class_names;
    for (int v : c.classifications()) class_names.push_back(c.variable(v).name);
    std::set<std::pair<int, int>> dep(c.edges().begin(), c.edges().end());
    bool flat = true;
    for (int y : c.classifications()) {
      for (int x : c.observations()) {
        if (!dep.count({y, x})) flat = false;
      }
    }
    if (dep.size() != c.classifications().size() * c.observations().size()) flat = false;
    if (coincide(c, class_names) != flat) {
      report.counterexamples.push_back(
          "trial " + std::to_string(t) +
          ": graph coincidence disagrees with the flat-structure test");
    }
  }
  return report;
}

}  // namespace idx
