#pragma once

#include "warpq/pipeline.hpp"

#include <filesystem>
#include <string>

namespace warpq {

/// Parses "r,c;r,c;..." (optionally "r,c,mul,add" per step).
StepSet parse_step_set(const std::string& text);
std::string format_step_set(const StepSet& steps);

/// Applies one `key=value` override. Throws kInvalidArgument on an unknown
/// key or unparsable value.
void apply_config_value(WarpQConfig& config, const std::string& key, const std::string& value);

/// Reads a key=value file (`#` comments, blank lines allowed).
void apply_config_file(WarpQConfig& config, const std::filesystem::path& path);

}  // namespace warpq
