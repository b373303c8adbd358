// Shipped experiment scenarios, keyed by name.
#pragma once

#include <string>
#include <vector>

#include "oqs/config.hpp"

namespace oqs {

struct PresetInfo {
    std::string name;
    std::string description;
};

const std::vector<PresetInfo>& preset_list();

// Config of a shipped preset; InvalidArgument for an unknown name.
ConfigFile preset_config(const std::string& name);

}  // namespace oqs
