#include "idx/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "idx/csv.hpp"
#include "idx/dataset.hpp"
#include "idx/errors.hpp"
#include "idx/influence.hpp"
#include "idx/inference.hpp"
#include "idx/rng.hpp"
#include "json.hpp"

namespace idx {

namespace {

std::string pair_name(const std::string& observation, const std::string& output) {
  return "('" + observation + "', '" + output + "')";
}

int sample_prior(const Classifier& c, int v, Rng& rng) {
  const auto& p = c.priors(v);
  double u = rng.next_double();
  double cum = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    cum += p[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

// Gaussian elimination with partial pivoting; false on a vanishing pivot.
bool solve_system(std::vector<std::vector<double>> m, std::vector<double> rhs,
                  std::vector<double>& out) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-12) return false;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = m[r][col] / m[col][col];
      if (f == 0) continue;
      for (std::size_t k = col; k < n; ++k) m[r][k] -= f * m[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= m[r][k] * out[k];
    out[r] = s / m[r][r];
  }
  return true;
}

}  // namespace

double AttributionScores::at(const std::string& observation, const std::string& output) const {
  auto it = values.find({observation, output});
  if (it == values.end()) {
    throw DataError("attribution unavailable for " + pair_name(observation, output));
  }
  return it->second;
}

bool AttributionScores::all_zero() const {
  for (const auto& [key, score] : values) {
    if (score != 0.0) return false;
  }
  return true;
}

AttributionScores surrogate_scores(const Classifier& c, const Assignment& a,
                                   const std::vector<std::string>& outputs,
                                   const SurrogateParams& params) {
  if (params.samples < 100) {
    throw UsageError("surrogate sample count must be at least 100");
  }
  if (params.resample_prob < 0 || params.resample_prob > 1) {
    throw UsageError("resample probability must lie in [0, 1]");
  }
  const auto output_ids = io_influences(c, outputs).outputs();
  const auto& obs = c.observations();
  const std::size_t m = obs.size();
  const std::size_t p = m + 1;  // intercept + one unchanged-indicator per observation
  const double width =
      params.kernel_width > 0 ? params.kernel_width : std::sqrt(static_cast<double>(m)) * 0.75;
  const auto base = detail::index_assignment(c, a);

  AttributionScores result;
  for (int y : output_ids) {
    int sigma;
    {
      detail::Chain chain(c, base);
      sigma = chain.value_of(y);
    }
    // One stream per output, keyed by variable index: evaluation order and
    // parallelism over outputs never change the draws.
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(y)));
    std::vector<std::vector<double>> normal(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    std::vector<double> feat(p, 0.0);

    for (int s = 0; s < params.samples; ++s) {
      auto ia = base;
      int dist = 0;
      feat[0] = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        int v = obs[j];
        int val = base.values[v];
        if (rng.next_double() < params.resample_prob) val = sample_prior(c, v, rng);
        ia.values[v] = val;
        bool unchanged = val == base.values[v];
        if (!unchanged) ++dist;
        feat[j + 1] = unchanged ? 1.0 : 0.0;
      }
      double weight = std::exp(-static_cast<double>(dist) * dist / (width * width));
      detail::Chain chain(c, ia);
      double target = chain.probability(y, sigma);
      for (std::size_t r = 0; r < p; ++r) {
        if (feat[r] == 0.0) continue;
        double wr = weight * feat[r];
        for (std::size_t k = r; k < p; ++k) normal[r][k] += wr * feat[k];
        rhs[r] += wr * target;
      }
    }
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t k = 0; k < r; ++k) normal[r][k] = normal[k][r];
    }

    std::vector<double> beta;
    if (!solve_system(normal, rhs, beta)) {
      for (std::size_t r = 0; r < p; ++r) normal[r][r] += params.ridge;
      if (!solve_system(normal, rhs, beta)) {
        throw DataError("surrogate normal equations unsolvable for output '" +
                        c.variable(y).name + "'");
      }
      result.diagnostics.push_back("singular normal equations for output '" + c.variable(y).name +
                                   "'; applied ridge penalty " + csv::format_double(params.ridge));
    }
    for (std::size_t j = 0; j < m; ++j) {
      result.values[{c.variable(obs[j]).name, c.variable(y).name}] = beta[j + 1];
    }
  }
  return result;
}

namespace {

// Prior-weighted expectation of P(y = sigma) with the given observations
// enumerated over their domains and everything else as in base.
double masked_expectation(const Classifier& c, const detail::IndexedAssignment& base,
                          const std::vector<int>& free_vars, int y, int sigma) {
  auto ia = base;
  std::vector<int> pos(free_vars.size(), 0);
  double total = 0;
  while (true) {
    double weight = 1;
    for (std::size_t j = 0; j < free_vars.size(); ++j) {
      ia.values[free_vars[j]] = pos[j];
      weight *= c.prior(free_vars[j], pos[j]);
    }
    detail::Chain chain(c, ia);
    total += weight * chain.probability(y, sigma);
    std::size_t j = 0;
    for (; j < free_vars.size(); ++j) {
      if (++pos[j] < static_cast<int>(c.variable(free_vars[j]).domain.size())) break;
      pos[j] = 0;
    }
    if (j == free_vars.size()) break;
  }
  return total;
}

}  // namespace

AttributionScores shapley_scores(const Classifier& c, const Assignment& a,
                                 const std::vector<std::string>& outputs) {
  const auto output_ids = io_influences(c, outputs).outputs();
  const auto& obs = c.observations();
  const std::size_t m = obs.size();
  if (m > 20) {
    throw UsageError("exact Shapley values handle at most 20 observations; use the surrogate");
  }
  double cost = 1;
  for (int v : obs) cost *= 1.0 + static_cast<double>(c.variable(v).domain.size());
  if (cost > 2e8) {
    throw BudgetError("exact Shapley enumeration needs about " +
                      std::to_string(static_cast<long long>(cost)) +
                      " posterior evaluations; use the surrogate");
  }
  const auto base = detail::index_assignment(c, a);

  // coeff[s] = s! (m-1-s)! / m! = 1 / (m * C(m-1, s)); the binomials stay
  // small enough to be exact in doubles for m <= 20.
  std::vector<double> coeff(m, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    double binom = 1;
    for (std::size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(m - 1 - s + k) / static_cast<double>(k);
    }
    coeff[s] = 1.0 / (static_cast<double>(m) * binom);
  }

  AttributionScores result;
  const std::size_t full = std::size_t{1} << m;
  std::vector<double> value(full, 0.0);
  std::vector<int> free_vars;
  for (int y : output_ids) {
    int sigma;
    {
      detail::Chain chain(c, base);
      sigma = chain.value_of(y);
    }
    for (std::size_t mask = 0; mask < full; ++mask) {
      free_vars.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (!(mask >> j & 1)) free_vars.push_back(obs[j]);
      }
      value[mask] = masked_expectation(c, base, free_vars, y, sigma);
    }
    std::vector<double> phi(m, 0.0);
    for (std::size_t mask = 0; mask < full; ++mask) {
      double w = coeff[std::popcount(mask)];
      for (std::size_t j = 0; j < m; ++j) {
        if (mask >> j & 1) continue;
        phi[j] += w * (value[mask | std::size_t{1} << j] - value[mask]);
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      result.values[{c.variable(obs[j]).name, c.variable(y).name}] = phi[j];
    }
  }
  return result;
}

namespace {

struct ScoreRow {
  std::string instance;
  std::string observation;
  std::string output;
  double score;
};

std::vector<ScoreRow> read_score_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open score file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  std::size_t first = text.find_first_not_of(" \t\r\n");
  std::vector<ScoreRow> rows;
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "scores/1") {
      throw DataError(path + ": expected score file format \"scores/1\"");
    }
    if (!doc.contains("scores") || !doc["scores"].is_array()) {
      throw DataError(path + ": missing \"scores\" array");
    }
    for (const auto& item : doc["scores"]) {
      if (!item.is_object() || !item.value("instance", nlohmann::json()).is_string() ||
          !item.value("observation", nlohmann::json()).is_string() ||
          !item.value("output", nlohmann::json()).is_string() ||
          !item.value("score", nlohmann::json()).is_number()) {
        throw DataError(path +
                        ": each score entry needs string instance/observation/output "
                        "and a numeric score");
      }
      rows.push_back({item["instance"].get<std::string>(), item["observation"].get<std::string>(),
                      item["output"].get<std::string>(), item["score"].get<double>()});
    }
    return rows;
  }

  csv::Table table = csv::parse(text, path);
  const std::vector<std::string> expected = {"instance", "observation", "output", "score"};
  if (table.header != expected) {
    throw DataError(path + ": score file header must be instance,observation,output,score");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    auto score = parse_double(cells[3]);
    if (!score) {
      throw DataError(path + ": non-numeric score '" + cells[3] + "' in row " +
                      std::to_string(i + 2));
    }
    rows.push_back({cells[0], cells[1], cells[2], *score});
  }
  return rows;
}

AttributionScores select_instance(const std::vector<ScoreRow>& rows, const std::string& path,
                                  const std::string& instance_id) {
  AttributionScores scores;
  bool seen = false;
  for (const auto& row : rows) {
    if (row.instance != instance_id) continue;
    seen = true;
    auto key = std::make_pair(row.observation, row.output);
    if (scores.values.count(key)) {
      throw DataError(path + ": duplicate score for " + pair_name(row.observation, row.output) +
                      " of instance '" + instance_id + "'");
    }
    scores.values[key] = row.score;
  }
  if (!seen) {
    throw DataError(path + ": no scores for instance '" + instance_id + "'");
  }
  return scores;
}

}  // namespace

AttributionScores load_scores(const std::string& path, const std::string& instance_id) {
  return select_instance(read_score_rows(path), path, instance_id);
}

void save_scores(const std::string& path, const std::string& instance_id,
                 const AttributionScores& scores) {
  csv::Table table;
  table.header = {"instance", "observation", "output", "score"};
  for (const auto& [key, score] : scores.values) {
    table.rows.push_back({instance_id, key.first, key.second, csv::format_double(score)});
  }
  csv::write(path, table);
}

void save_scores_json(const std::string& path, const std::string& instance_id,
                      const AttributionScores& scores) {
  nlohmann::ordered_json doc;
  doc["format"] = "scores/1";
  auto& arr = doc["scores"] = nlohmann::ordered_json::array();
  for (const auto& [key, score] : scores.values) {
    arr.push_back({{"instance", instance_id},
                   {"observation", key.first},
                   {"output", key.second},
                   {"score", score}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write score file: " + path);
  out << doc.dump(2) << "\n";
}

namespace {

class SurrogateSource : public AttributionSource {
public:
  explicit SurrogateSource(SurrogateParams params) : params_(params) {}
  std::string name() const override { return "surrogate"; }
  AttributionScores scores(const Classifier& c, const Assignment& a,
                           const std::vector<std::string>& outputs) const override {
    return surrogate_scores(c, a, outputs, params_);
  }

private:
  SurrogateParams params_;
};

class ShapleySource : public AttributionSource {
public:
  std::string name() const override { return "shapley"; }
  AttributionScores scores(const Classifier& c, const Assignment& a,
                           const std::vector<std::string>& outputs) const override {
    return shapley_scores(c, a, outputs);
  }
};

class FileSource : public AttributionSource {
public:
  FileSource(std::string path, std::function<std::string(const Assignment&)> resolve_id)
      : path_(std::move(path)), resolve_id_(std::move(resolve_id)), rows_(read_score_rows(path_)) {}

  std::string name() const override { return "file:" + path_; }

  AttributionScores scores(const Classifier& c, const Assignment& a,
                           const std::vector<std::string>& outputs) const override {
    const auto graph = io_influences(c, outputs);
    std::string id = resolve_id_ ? resolve_id_(a) : "0";
    AttributionScores selected = select_instance(rows_, path_, id);
    for (const auto& [key, score] : selected.values) {
      int x = c.index_of(key.first);
      int y = c.index_of(key.second);
      if (x < 0 || !c.is_observation(x)) {
        throw DataError(path_ + ": score file names '" + key.first +
                        "', which is not an observation of the classifier");
      }
      if (y < 0 || !graph.has_edge(x, y)) {
        throw DataError(path_ + ": score file names output '" + key.second +
                        "', which is not among the declared outputs");
      }
    }
    for (const auto& edge : graph.edges()) {
      const auto& x = c.variable(edge.source).name;
      const auto& y = c.variable(edge.target).name;
      if (!selected.values.count({x, y})) {
        throw DataError(path_ + ": missing score for " + pair_name(x, y) + " of instance '" + id +
                        "'");
      }
    }
    return selected;
  }

private:
  std::string path_;
  std::function<std::string(const Assignment&)> resolve_id_;
  std::vector<ScoreRow> rows_;
};

}  // namespace

std::shared_ptr<AttributionSource> make_surrogate_source(SurrogateParams params) {
  return std::make_shared<SurrogateSource>(params);
}

std::shared_ptr<AttributionSource> make_shapley_source() {
  return std::make_shared<ShapleySource>();
}

std::shared_ptr<AttributionSource> make_file_source(
    std::string path, std::function<std::string(const Assignment&)> resolve_id) {
  return std::make_shared<FileSource>(std::move(path), std::move(resolve_id));
}

}  // namespace idx
