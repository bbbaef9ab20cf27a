#pragma once

#include <filesystem>

#include "bird/attack_sim.hpp"

namespace bird {

// Scenario files are JSON lines: one header record fixing {dimension,
// metric}, then one record per query and per document. Vector components
// are written with round-trip precision.

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Throws Errc::parse with the offending line number on malformed input,
/// including dimension mismatches against the header.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace bird
