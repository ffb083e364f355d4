#pragma once

#include "ficds/sim.hpp"
#include "ficds/topology.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ficds {

/// One fully described analysis case: the microgrid, the frequency-domain
/// options, and (when present) the simulation setup with its event script.
struct CaseConfig {
    MicrogridTopology topology;
    AnalysisOptions analysis;
    SimConfig sim;
    std::vector<Event> events;
    bool has_simulation = false;
};

/// Parse and validate a config document. Unknown keys are rejected and every
/// violation names the offending field with its dotted path.
CaseConfig parse_config(const nlohmann::json& doc);

/// Read a config file; io errors and JSON syntax errors carry the file name.
CaseConfig load_config(const std::filesystem::path& path);

} // namespace ficds
