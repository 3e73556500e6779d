#pragma once

#include <filesystem>
#include <string>

#include "adl/hhmm.hpp"

namespace adl {

// Versioned JSON model document. save -> load -> save is byte-stable.
std::string model_to_json(const HhmmModel& model);
HhmmModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const HhmmModel& model);
HhmmModel load_model(const std::filesystem::path& path);

}  // namespace adl
