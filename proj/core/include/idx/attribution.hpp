#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "idx/model.hpp"

namespace idx {

// Signed scores keyed by (observation, output). Sign carries the dialectical
// reading: negative = speaks against the decided output value, positive =
// speaks for it.
struct AttributionScores {
  std::map<std::pair<std::string, std::string>, double> values;
  std::vector<std::string> diagnostics;

  double at(const std::string& observation, const std::string& output) const;
  bool all_zero() const;
};

struct SurrogateParams {
  int samples = 5000;        // >= 100
  double kernel_width = 0;   // 0 -> sqrt(|observations|) * 0.75
  double resample_prob = 0.5;
  double ridge = 1e-6;
  std::uint64_t seed = 0;
};

// Local linear surrogate: draws `samples` perturbed inputs (each observation
// independently resampled from its prior with probability resample_prob),
// encodes them as unchanged-indicators, and fits weighted least squares
// against the posterior of the decided output value, with kernel weight
// exp(-d^2 / width^2) on the Hamming distance d. Score of an observation is
// its coefficient. One RNG stream per output, derived from the seed by output
// variable index, so evaluation order never changes results.
AttributionScores surrogate_scores(const Classifier& c, const Assignment& a,
                                   const std::vector<std::string>& outputs,
                                   const SurrogateParams& params = {});

// Exact Shapley values for the game v(S) = expected posterior of the decided
// output value with observations in S clamped to their assigned values and
// the rest marginalized under their priors. Requires |observations| <= 20;
// throws BudgetError if the masking enumeration is infeasibly large.
AttributionScores shapley_scores(const Classifier& c, const Assignment& a,
                                 const std::vector<std::string>& outputs);

// Score files: CSV with header instance,observation,output,score, or JSON
// {"format": "scores/1", "scores": [{"instance": ..., ...}]}. Selects the
// rows of one instance id.
AttributionScores load_scores(const std::string& path, const std::string& instance_id);
void save_scores(const std::string& path, const std::string& instance_id,
                 const AttributionScores& scores);
void save_scores_json(const std::string& path, const std::string& instance_id,
                      const AttributionScores& scores);

// Pluggable provider used by attribution-backed explanation kits.
class AttributionSource {
public:
  virtual ~AttributionSource() = default;
  virtual std::string name() const = 0;
  virtual AttributionScores scores(const Classifier& c, const Assignment& a,
                                   const std::vector<std::string>& outputs) const = 0;
};

std::shared_ptr<AttributionSource> make_surrogate_source(SurrogateParams params = {});
std::shared_ptr<AttributionSource> make_shapley_source();
// resolve_id maps an assignment to the instance id used in the file;
// defaults to every assignment reading the rows of instance "0".
std::shared_ptr<AttributionSource> make_file_source(
    std::string path, std::function<std::string(const Assignment&)> resolve_id = {});

}  // namespace idx
