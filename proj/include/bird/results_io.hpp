#pragma once

#include <filesystem>
#include <span>

#include "bird/attack_sim.hpp"
#include "bird/defense.hpp"

namespace bird {

// Defense results are JSON lines, one record per query, carrying the full
// per-document audit trail. Infinite composite scores serialize as "inf".

void save_results(std::span<const DefenseResult> results, const Scenario& scenario,
                  const std::filesystem::path& path);

std::vector<DefenseResult> load_results(const std::filesystem::path& path);

struct LabeledScores {
    std::vector<double> poison;
    std::vector<double> benign;
};

/// Composite scores grouped by the label recorded in the results file
/// (for threshold calibration).
LabeledScores load_labeled_scores(const std::filesystem::path& path);

}  // namespace bird
