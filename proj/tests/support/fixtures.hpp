#pragma once

#include <string>
#include <vector>

#include "idx/dataset.hpp"
#include "idx/explanation.hpp"
#include "idx/model.hpp"

namespace fixtures {

// One row of the play-outside decision table together with its published
// relation sets. Influencer sets are space-separated variable names, "" for
// the empty set. The md_* sets are subsets of the matching sd_* sets.
struct GoldenRow {
  const char* w;
  const char* t;
  const char* p;
  const char* r;  // decided label for r
  const char* o;  // decided label for o
  const char* sd_att_r;
  const char* sd_sup_r;
  const char* md_att_r;
  const char* md_sup_r;
  const char* sd_att_o;
  const char* sd_sup_o;
  const char* md_att_o;
  const char* md_sup_o;
  const char* cf_crit_r;
  const char* cf_pot_r;
  const char* cf_crit_o;
  const char* cf_pot_o;
};

const std::vector<GoldenRow>& golden_rows();

// Every published probability of the fitted play-outside tables, printed to
// two decimals. parent == "" marks a prior.
struct GoldenProb {
  const char* var;
  const char* value;
  const char* parent;
  const char* parent_value;
  double printed;
};
const std::vector<GoldenProb>& golden_probs();

// Absolute path of a shipped data file.
std::string data_path(const std::string& name);

idx::Dataset play_outside_data();
// Fitted with alpha = 0.1 and the declared dependency structure.
idx::Classifier play_outside_model();

idx::Assignment row_input(const GoldenRow& row);
std::vector<std::string> names(const char* set);

// Name-based table lookups (the classifier API is index-based).
double prior_of(const idx::Classifier& c, const std::string& var, const std::string& value);
double conditional_of(const idx::Classifier& c, const std::string& parent,
                      const std::string& child, const std::string& child_val,
                      const std::string& parent_val);

// Expected full-graph explanation for one golden row, built straight from the
// published relation sets: per-type edges into each classification, pruned to
// the variables that reach the explanandum through them. Independent of the
// engine's walk.
idx::Idx expected_idx(const idx::ExplanationKit& kit, const GoldenRow& row,
                      const std::string& explanandum);

}  // namespace fixtures
