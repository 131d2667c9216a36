#pragma once

#include <string>
#include <string_view>

#include "advf/forest.hpp"
#include "advf/nn.hpp"

namespace advf {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kForestFormatVersion = 1;

/// Versioned JSON; doubles round-trip bit-exactly.
std::string model_to_json(const nn::NeuralModel& model);
/// Throws std::runtime_error on malformed or mismatched documents.
nn::NeuralModel model_from_json(std::string_view text);

std::string forest_to_json(const forest::ForestModel& forest);
forest::ForestModel forest_from_json(std::string_view text);

}  // namespace advf
