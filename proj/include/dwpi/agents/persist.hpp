#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dwpi/agents/dwdqn.hpp"
#include "dwpi/agents/dwtq.hpp"

namespace dwpi::agents {

std::string serialize(const QTableSet& set);
QTableSet deserialize_qtables(std::string_view text);

/// Hyperparameter header followed by the online network blob.
std::string serialize(const DwdqnAgent& agent);
DwdqnAgent deserialize_dwdqn(std::string_view text);

void save_text(const std::filesystem::path& path, const std::string& text);
std::string load_text(const std::filesystem::path& path);

}  // namespace dwpi::agents
