// Executes a validated experiment config: builds the model, runs the
// requested computation and writes the CSV outputs plus the metadata
// sidecar.
#pragma once

#include <string>
#include <vector>

#include "oqs/config.hpp"

namespace oqs {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunArtifacts {
    std::vector<std::string> outputs;  // files written, sidecar last
};

RunArtifacts run_experiment(const ExperimentConfig& cfg);

}  // namespace oqs
