#pragma once

#include "json.hpp"

#include "qgsw/cli.hpp"

namespace qgsw::cli::detail {

/// Typed echo of every field, used for manifests and JSON summaries.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace qgsw::cli::detail
