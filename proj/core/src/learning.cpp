#include "idx/learning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "idx/errors.hpp"
#include "idx/rng.hpp"

namespace idx {

namespace {

std::vector<double> numeric_column(const Dataset& d, std::size_t col) {
  std::vector<double> out;
  out.reserve(d.row_count());
  for (std::size_t r = 0; r < d.row_count(); ++r) out.push_back(d.numeric_cell(r, col));
  return out;
}

std::string bucket_label(int i) { return "b" + std::to_string(i); }

}  // namespace

DiscretizedColumn discretize_column(const std::vector<double>& values, const BinSpec& spec,
                                    const std::string& column_name) {
  std::vector<double> cuts;
  switch (spec.strategy) {
    case BinSpec::Strategy::EqualWidth: {
      if (spec.count < 2) throw UsageError("bins for '" + column_name + "' need count >= 2");
      auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
      if (values.empty() || *lo_it == *hi_it) {
        throw DataError("column '" + column_name +
                        "' is constant; equal-width binning would produce a single bucket");
      }
      const double lo = *lo_it, hi = *hi_it;
      for (int k = 1; k < spec.count; ++k) {
        cuts.push_back(lo + k * (hi - lo) / spec.count);
      }
      break;
    }
    case BinSpec::Strategy::EqualFrequency: {
      if (spec.count < 2) throw UsageError("bins for '" + column_name + "' need count >= 2");
      if (values.empty()) throw DataError("column '" + column_name + "' is empty");
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      const double n = static_cast<double>(sorted.size());
      for (int k = 1; k < spec.count; ++k) {
        auto pos = static_cast<std::size_t>(std::ceil(k * n / spec.count)) - 1;
        cuts.push_back(sorted[std::min(pos, sorted.size() - 1)]);
      }
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      break;
    }
    case BinSpec::Strategy::Custom: {
      if (spec.cuts.empty()) throw UsageError("custom bins for '" + column_name + "' need cuts");
      for (std::size_t i = 1; i < spec.cuts.size(); ++i) {
        if (!(spec.cuts[i - 1] < spec.cuts[i])) {
          throw UsageError("custom cuts for '" + column_name + "' must be strictly ascending");
        }
      }
      cuts = spec.cuts;
      break;
    }
    case BinSpec::Strategy::None:
      throw UsageError("discretize_column called with strategy 'none'");
  }

  DiscretizedColumn out;
  out.cuts = cuts;
  out.bucket_count = static_cast<int>(cuts.size()) + 1;
  out.labels.reserve(values.size());
  for (double v : values) {
    int bucket = 0;
    for (double c : cuts) {
      if (v > c) ++bucket;
      else break;
    }
    out.labels.push_back(bucket_label(bucket));
  }
  return out;
}

void discretize(Dataset& d, const std::map<std::string, BinSpec>& specs) {
  for (const auto& [name, spec] : specs) {
    std::size_t col = d.column_index(name);
    if (spec.strategy == BinSpec::Strategy::None) continue;
    if (d.column_type(col) != ColumnType::Numeric) {
      throw DataError("bins declared for non-numeric column '" + name + "'");
    }
    auto result = discretize_column(numeric_column(d, col), spec, name);
    d.replace_column(col, std::move(result.labels));
  }
  for (std::size_t col = 0; col < d.column_count(); ++col) {
    if (d.column_type(col) == ColumnType::Numeric && !specs.count(d.columns()[col])) {
      throw DataError("numeric column '" + d.columns()[col] +
                      "' has no bins entry (use strategy 'none' to keep it categorical)");
    }
  }
}

namespace {

struct ColumnCodes {
  std::vector<std::string> domain;
  std::vector<int> codes;  // per row
};

ColumnCodes encode_column(const Dataset& d, std::size_t col) {
  ColumnCodes out;
  out.domain = d.distinct_values(col);
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < out.domain.size(); ++i) index[out.domain[i]] = static_cast<int>(i);
  out.codes.reserve(d.row_count());
  for (std::size_t r = 0; r < d.row_count(); ++r) out.codes.push_back(index.at(d.cell(r, col)));
  return out;
}

std::vector<double> smoothed_priors(const std::vector<int>& codes, std::size_t k, double alpha) {
  std::vector<double> counts(k, 0.0);
  for (int c : codes) counts[c] += 1.0;
  const double n = static_cast<double>(codes.size());
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (counts[i] + alpha) / (n + alpha * k);
  return out;
}

std::vector<double> fixed_priors_row(const Hyperparams& h, const std::string& var,
                                     const std::vector<std::string>& domain) {
  const auto& fixed = h.fixed_priors.at(var);
  if (fixed.size() != domain.size()) {
    throw DataError("fixed priors for '" + var + "' do not cover its domain");
  }
  std::vector<double> out;
  out.reserve(domain.size());
  for (const auto& value : domain) {
    auto it = fixed.find(value);
    if (it == fixed.end()) {
      throw DataError("fixed priors for '" + var + "' missing value '" + value + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

Classifier fit_with_edges(const Dataset& d, const std::set<std::string>& class_cols,
                          const std::vector<std::pair<std::string, std::string>>& edges,
                          const Hyperparams& h) {
  if (d.row_count() == 0) throw DataError("cannot fit on an empty dataset");
  if (h.alpha < 0) throw UsageError("alpha must be >= 0");

  std::map<std::string, ColumnCodes> codes;
  ClassifierBuilder b;
  for (std::size_t col = 0; col < d.column_count(); ++col) {
    const auto& name = d.columns()[col];
    auto enc = encode_column(d, col);
    if (enc.domain.size() < 2) {
      throw DataError("column '" + name + "' has a single distinct value; domains need >= 2");
    }
    VarRole role = class_cols.count(name) ? VarRole::Classification : VarRole::Observation;
    b.add_variable(name, role, enc.domain);
    codes[name] = std::move(enc);
  }
  for (const auto& [parent, child] : edges) b.add_edge(parent, child);

  bool zero_cells = false;
  for (std::size_t col = 0; col < d.column_count(); ++col) {
    const auto& name = d.columns()[col];
    const auto& enc = codes.at(name);
    if (h.fixed_priors.count(name)) {
      b.set_priors(name, fixed_priors_row(h, name, enc.domain));
    } else {
      auto pr = smoothed_priors(enc.codes, enc.domain.size(), h.alpha);
      if (h.alpha == 0) {
        for (double p : pr) zero_cells = zero_cells || p == 0.0;
      }
      b.set_priors(name, pr);
    }
  }

  for (const auto& [parent, child] : edges) {
    const auto& pe = codes.at(parent);
    const auto& ce = codes.at(child);
    const std::size_t pk = pe.domain.size();
    const std::size_t ck = ce.domain.size();
    std::vector<double> parent_counts(pk, 0.0);
    std::vector<std::vector<double>> joint(ck, std::vector<double>(pk, 0.0));
    for (std::size_t r = 0; r < d.row_count(); ++r) {
      parent_counts[pe.codes[r]] += 1.0;
      joint[ce.codes[r]][pe.codes[r]] += 1.0;
    }
    std::vector<std::vector<double>> rows(ck, std::vector<double>(pk));
    for (std::size_t i = 0; i < ck; ++i) {
      for (std::size_t m = 0; m < pk; ++m) {
        rows[i][m] = (joint[i][m] + h.alpha) / (parent_counts[m] + h.alpha * ck);
        if (rows[i][m] == 0.0) zero_cells = true;
      }
    }
    b.set_conditional(parent, child, std::move(rows));
  }

  if (zero_cells) {
    b.add_warning("zero-probability cells present (alpha = 0); decisions may be degenerate");
  }
  return b.build();
}

}  // namespace

Classifier fit_nbc(const Dataset& d, const std::string& class_col, const Hyperparams& h) {
  d.column_index(class_col);  // existence check
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& name : d.columns()) {
    if (name != class_col) edges.emplace_back(class_col, name);
  }
  if (edges.empty()) throw DataError("dataset has no observation columns");
  return fit_with_edges(d, {class_col}, edges, h);
}

double mutual_information(const Dataset& d, std::size_t col_a, std::size_t col_b) {
  auto a = encode_column(d, col_a);
  auto b = encode_column(d, col_b);
  const std::size_t ka = a.domain.size(), kb = b.domain.size();
  const double n = static_cast<double>(d.row_count());
  std::vector<double> pa(ka, 0.0), pb(kb, 0.0);
  std::vector<std::vector<double>> pab(ka, std::vector<double>(kb, 0.0));
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    pa[a.codes[r]] += 1.0;
    pb[b.codes[r]] += 1.0;
    pab[a.codes[r]][b.codes[r]] += 1.0;
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i) {
    for (std::size_t j = 0; j < kb; ++j) {
      if (pab[i][j] == 0.0) continue;
      const double pj = pab[i][j] / n;
      mi += pj * std::log(pj * n * n / (pa[i] * pb[j]));
    }
  }
  return mi;
}

Classifier fit_bcc(const Dataset& d, const std::vector<std::string>& class_cols,
                   const Hyperparams& h, const std::optional<Structure>& structure,
                   const ChainOptions& chain) {
  if (class_cols.empty()) throw UsageError("fit_bcc needs at least one class column");
  std::set<std::string> classes;
  for (const auto& c : class_cols) {
    d.column_index(c);
    if (!classes.insert(c).second) throw UsageError("duplicate class column '" + c + "'");
  }

  if (structure) {
    if (structure->edges.empty()) throw UsageError("explicit structure has no edges");
    for (const auto& [parent, child] : structure->edges) {
      if (!classes.count(parent)) {
        throw DataError("structure edge parent '" + parent + "' is not a class column");
      }
      d.column_index(child);
    }
    return fit_with_edges(d, classes, structure->edges, h);
  }

  // Maximum-spanning-tree over pairwise MI (Prim, deterministic tie-breaks by
  // column order), rooted and oriented root -> leaves.
  const std::size_t k = class_cols.size();
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::vector<int>> tree_children(k);
  std::vector<char> is_tree_parent(k, 0);

  if (k > 1) {
    std::vector<std::vector<double>> mi(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double v = mutual_information(d, d.column_index(class_cols[i]),
                                      d.column_index(class_cols[j]));
        mi[i][j] = mi[j][i] = v;
      }
    }

    std::size_t root = 0;
    if (!chain.root.empty()) {
      auto it = std::find(class_cols.begin(), class_cols.end(), chain.root);
      if (it == class_cols.end()) {
        throw UsageError("chain root '" + chain.root + "' is not a class column");
      }
      root = static_cast<std::size_t>(it - class_cols.begin());
    } else {
      double best = -1.0;
      for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += mi[i][j];
        if (s > best) {
          best = s;
          root = i;
        }
      }
    }

    std::vector<char> in_tree(k, 0);
    in_tree[root] = 1;
    std::vector<std::pair<std::size_t, std::size_t>> tree_edges;  // (in-tree, added)
    for (std::size_t step = 1; step < k; ++step) {
      double best = -1.0;
      std::size_t bi = 0, bj = 0;
      bool found = false;
      for (std::size_t i = 0; i < k; ++i) {
        if (!in_tree[i]) continue;
        for (std::size_t j = 0; j < k; ++j) {
          if (in_tree[j]) continue;
          if (!found || mi[i][j] > best) {
            best = mi[i][j];
            bi = i;
            bj = j;
            found = true;
          }
        }
      }
      in_tree[bj] = 1;
      tree_edges.emplace_back(bi, bj);
    }
    for (auto [i, j] : tree_edges) {
      edges.emplace_back(class_cols[i], class_cols[j]);
      tree_children[i].push_back(static_cast<int>(j));
      is_tree_parent[i] = 1;
    }
  } else if (!chain.root.empty() && chain.root != class_cols[0]) {
    throw UsageError("chain root '" + chain.root + "' is not a class column");
  }

  for (std::size_t i = 0; i < k; ++i) {
    const bool leaf = tree_children[i].empty();
    if (chain.attach == ChainOptions::Attach::Leaves && !leaf) continue;
    for (const auto& name : d.columns()) {
      if (!classes.count(name)) edges.emplace_back(class_cols[i], name);
    }
  }
  if (edges.empty()) throw DataError("dataset has no observation columns");
  return fit_with_edges(d, classes, edges, h);
}

SplitResult split(const Dataset& d, double ratio, std::uint64_t seed,
                  const std::string& stratify_col) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw UsageError("split ratio must lie strictly between 0 and 1");
  }
  const std::size_t col = d.column_index(stratify_col);
  const std::size_t n = d.row_count();
  if (n < 2) throw DataError("cannot split a dataset with fewer than 2 rows");

  std::map<std::string, std::vector<std::size_t>> strata;
  std::vector<std::string> stratum_order;
  for (std::size_t r = 0; r < n; ++r) {
    auto& bucket = strata[d.cell(r, col)];
    if (bucket.empty()) stratum_order.push_back(d.cell(r, col));
    bucket.push_back(r);
  }

  SplitResult out;
  bool stratified = true;
  for (const auto& [value, rows] : strata) {
    (void)value;
    if (rows.size() < 2) stratified = false;
  }
  if (!stratified) {
    out.warnings.push_back("stratum with fewer than 2 rows; falling back to unstratified split");
  }

  auto shuffle = [](std::vector<std::size_t>& rows, Rng& rng) {
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.next_below(i)]);
    }
  };

  const auto train_target = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  std::vector<std::size_t> train_rows, test_rows;

  if (!stratified) {
    std::vector<std::size_t> rows(n);
    for (std::size_t r = 0; r < n; ++r) rows[r] = r;
    Rng rng(derive_seed(seed, 0));
    shuffle(rows, rng);
    train_rows.assign(rows.begin(), rows.begin() + train_target);
    test_rows.assign(rows.begin() + train_target, rows.end());
  } else {
    // Largest-remainder allocation of the train quota across strata.
    struct Quota {
      std::size_t stratum;
      std::size_t base;
      double frac;
    };
    std::vector<Quota> quotas;
    std::size_t base_total = 0;
    for (std::size_t s = 0; s < stratum_order.size(); ++s) {
      const auto& rows = strata[stratum_order[s]];
      const double q = ratio * static_cast<double>(rows.size());
      const auto base = static_cast<std::size_t>(std::floor(q));
      quotas.push_back({s, base, q - std::floor(q)});
      base_total += base;
    }
    std::vector<std::size_t> extra_order(quotas.size());
    for (std::size_t i = 0; i < quotas.size(); ++i) extra_order[i] = i;
    std::stable_sort(extra_order.begin(), extra_order.end(), [&](std::size_t a, std::size_t b) {
      return quotas[a].frac > quotas[b].frac;
    });
    std::size_t remaining = train_target > base_total ? train_target - base_total : 0;
    std::vector<std::size_t> take(quotas.size());
    for (std::size_t i = 0; i < quotas.size(); ++i) take[i] = quotas[i].base;
    for (std::size_t i = 0; i < extra_order.size() && remaining > 0; ++i, --remaining) {
      ++take[extra_order[i]];
    }

    for (std::size_t s = 0; s < stratum_order.size(); ++s) {
      auto rows = strata[stratum_order[s]];
      Rng rng(derive_seed(seed, s + 1));
      shuffle(rows, rng);
      const std::size_t t = std::min(take[s], rows.size());
      train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + t);
      test_rows.insert(test_rows.end(), rows.begin() + t, rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
  }

  if (train_rows.empty() || test_rows.empty()) {
    throw DataError("split produced an empty train or test set");
  }
  out.train = d.select_rows(train_rows);
  out.test = d.select_rows(test_rows);
  out.stratified = stratified;
  return out;
}

namespace {

using nlohmann::json;

BinSpec parse_bin_spec(const json& j, const std::string& column) {
  BinSpec spec;
  const std::string strategy = j.value("strategy", "ss");
  if (strategy == "ss") spec.strategy = BinSpec::Strategy::EqualFrequency;
  else if (strategy == "sl") spec.strategy = BinSpec::Strategy::EqualWidth;
  else if (strategy == "custom") spec.strategy = BinSpec::Strategy::Custom;
  else if (strategy == "none") spec.strategy = BinSpec::Strategy::None;
  else throw DataError("unknown bin strategy '" + strategy + "' for column '" + column + "'");
  spec.count = j.value("count", 0);
  if (j.contains("cuts")) spec.cuts = j.at("cuts").get<std::vector<double>>();
  return spec;
}

}  // namespace

TrainConfig parse_train_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid config JSON: ") + e.what());
  }
  TrainConfig cfg;
  try {
    cfg.hyper.alpha = doc.value("alpha", 1.0);
    if (doc.contains("priors")) {
      for (const auto& [var, row] : doc.at("priors").items()) {
        std::map<std::string, double> fixed;
        for (const auto& [value, p] : row.items()) fixed[value] = p.get<double>();
        cfg.hyper.fixed_priors[var] = std::move(fixed);
      }
    }
    if (doc.contains("classes")) {
      cfg.classes = doc.at("classes").get<std::vector<std::string>>();
    }
    if (doc.contains("bins")) {
      for (const auto& [column, spec] : doc.at("bins").items()) {
        cfg.bins[column] = parse_bin_spec(spec, column);
      }
    }
    if (doc.contains("chain")) {
      const auto& chain = doc.at("chain");
      cfg.chain.root = chain.value("root", "");
      const std::string attach = chain.value("attach", "leaves");
      if (attach == "leaves") cfg.chain.attach = ChainOptions::Attach::Leaves;
      else if (attach == "all") cfg.chain.attach = ChainOptions::Attach::All;
      else throw DataError("unknown chain.attach '" + attach + "'");
    }
    if (doc.contains("structure")) {
      Structure s;
      for (const auto& e : doc.at("structure").at("edges")) {
        if (!e.is_array() || e.size() != 2) {
          throw DataError("structure edge must be a [parent, child] pair");
        }
        s.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
      }
      cfg.structure = std::move(s);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_train_config(ss.str());
}

}  // namespace idx
