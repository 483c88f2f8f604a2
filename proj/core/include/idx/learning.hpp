#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idx/dataset.hpp"
#include "idx/model.hpp"

namespace idx {

struct BinSpec {
  enum class Strategy {
    EqualWidth,      // "sl": cuts at min + k*(max-min)/count
    EqualFrequency,  // "ss": cuts at empirical quantiles k/count, duplicates merged
    Custom,          // explicit ascending cut points
    None,            // keep column as categorical codes
  };
  Strategy strategy = Strategy::EqualFrequency;
  int count = 0;
  std::vector<double> cuts;
};

struct Hyperparams {
  double alpha = 1.0;  // Laplace smoothing; 0 permits zero cells (flagged)
  // Fixed priors per variable (value -> probability), overriding counting.
  std::map<std::string, std::map<std::string, double>> fixed_priors;
};

// Explicit dependency structure (parent -> child column names). When present
// it replaces the learned class chain entirely.
struct Structure {
  std::vector<std::pair<std::string, std::string>> edges;
};

struct ChainOptions {
  std::string root;  // empty: class with highest summed mutual information
  enum class Attach { Leaves, All };
  Attach attach = Attach::Leaves;
};

// Buckets a numeric column; label i is "b{i}" and a value lands in bucket
// #{cuts < value}. Returns the effective cut points after merging duplicates.
struct DiscretizedColumn {
  std::vector<std::string> labels;
  std::vector<double> cuts;
  int bucket_count = 0;
};
DiscretizedColumn discretize_column(const std::vector<double>& values, const BinSpec& spec,
                                    const std::string& column_name);

// Applies specs in place. Every numeric column must have a spec (use
// Strategy::None to keep integer-coded categories); specs for categorical
// columns are rejected.
void discretize(Dataset& d, const std::map<std::string, BinSpec>& specs);

// Naive-Bayes classifier: one classification whose children are all other
// columns. Domains are the distinct column values in first-appearance order;
// priors (count + alpha) / (N + alpha*|V|) unless fixed; conditionals
// (count + alpha) / (count(class value) + alpha*|V(child)|).
Classifier fit_nbc(const Dataset& d, const std::string& class_col, const Hyperparams& h = {});

// Chained classifier over several class columns. With an explicit structure
// the declared edges are used as-is; otherwise the classes are joined by a
// maximum-spanning-tree on pairwise mutual information, rooted per options,
// oriented root -> leaves, and every non-class column is attached as a child
// of each leaf class (or of every class with Attach::All).
Classifier fit_bcc(const Dataset& d, const std::vector<std::string>& class_cols,
                   const Hyperparams& h = {}, const std::optional<Structure>& structure = {},
                   const ChainOptions& chain = {});

// Plug-in mutual information (natural log) between two columns.
double mutual_information(const Dataset& d, std::size_t col_a, std::size_t col_b);

struct SplitResult {
  Dataset train;
  Dataset test;
  bool stratified = true;
  std::vector<std::string> warnings;
};

// Deterministic stratified split: per-stratum shuffle with seeds derived from
// `seed`, train quotas by largest remainder against floor(ratio * N). Falls
// back to an unstratified split (with a warning) when any stratum has fewer
// than 2 rows. Requires 0 < ratio < 1.
SplitResult split(const Dataset& d, double ratio, std::uint64_t seed,
                  const std::string& stratify_col);

// Training configuration document: keys "alpha", "priors.{var}",
// "bins.{column}" (strategy/count/cuts), "classes", "chain.root",
// "chain.attach", "structure.edges".
struct TrainConfig {
  Hyperparams hyper;
  std::vector<std::string> classes;
  std::map<std::string, BinSpec> bins;
  ChainOptions chain;
  std::optional<Structure> structure;
};
TrainConfig parse_train_config(const std::string& json_text);
TrainConfig load_train_config(const std::string& path);

}  // namespace idx
