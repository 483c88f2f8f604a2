#pragma once

#include <string>

#include "idx/model.hpp"

namespace idx {

// Model document: format tag, variables (name/role/domain, order significant),
// edges (parent -> child), priors and conditionals nested by
// variable/value/parent/parent-value. Doubles round-trip losslessly.
std::string to_json(const Classifier& c, int indent = 2);
Classifier classifier_from_json(const std::string& text);

void save_classifier(const Classifier& c, const std::string& path);
Classifier load_classifier(const std::string& path);

}  // namespace idx
