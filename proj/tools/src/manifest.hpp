#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace mirrorfix::app {

/// Writes <out_dir>/manifest.json: command, tool version, SHA-256 of every
/// input file, the flag snapshot, and the produced file names. Contains no
/// timestamps so identical runs produce identical manifests.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

} // namespace mirrorfix::app
