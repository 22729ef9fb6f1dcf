#pragma once

#include <string>
#include <vector>

#include "clmbr/sim.hpp"

namespace clmbr {

// Wine tasting data: 72 bottles, temperature and contact indicators, and a
// 3-level bitterness rating (low / middle / high). Matches data/wine.csv.
Dataset wine_dataset();

// Names accepted by preset_configs (and the CLI --preset flag).
std::vector<std::string> preset_names();

// Built-in study configurations. Most names yield a single study;
// "table2" expands to one study per link. Throws std::invalid_argument for
// unknown names.
std::vector<SimConfig> preset_configs(const std::string& name);

}  // namespace clmbr
