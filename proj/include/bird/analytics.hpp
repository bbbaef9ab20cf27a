#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bird/attack_sim.hpp"
#include "bird/defense.hpp"

namespace bird {

/// Rank-position poison-frequency statistics aggregated over a scenario's
/// queries: one forward column plus one row per forward rank (the backward
/// ranking pivoted on that rank's document). Cells are counts divided by
/// the number of queries.
struct HeatmapMatrix {
    size_t k = 0;
    size_t num_queries = 0;
    std::vector<double> forward_column;  // length k
    std::vector<double> backward_rows;   // k*k, row-major

    double backward_at(size_t row, size_t col) const { return backward_rows[row * k + col]; }
};

/// Per-query pilot subsets (top benign docs plus the query's poisons) feed
/// the counting; the merged corpus is not used here.
HeatmapMatrix heatmap(const Scenario& scenario, size_t k, size_t pilot_benign = 20);

/// Retrieval-level stand-ins for attack success and answer accuracy.
struct ProxyMetrics {
    double poison_leak_rate = 0.0;   // queries with >= 1 poison kept
    double gold_retention = 0.0;     // queries whose gold doc survives
    double filter_precision = 0.0;   // poisons among filtered docs
    double filter_recall = 0.0;      // filtered poisons among top-k poisons
    double mean_benign_kept = 0.0;
};

ProxyMetrics proxy_metrics(std::span<const DefenseResult> results, const Scenario& scenario);

enum class SweepAxis { epsilon, k, m, metric };

SweepAxis sweep_axis_from_string(const std::string& s);
const char* to_string(SweepAxis a);

struct SweepSpec {
    SweepAxis axis = SweepAxis::epsilon;
    std::vector<double> values;  // ignored for the metric axis
};

struct SweepRow {
    std::string axis;
    std::string value;
    ProxyMetrics metrics;
};

/// One defense run per axis value with everything else held fixed. The m
/// axis keeps the first m poisons per target query, so values must not
/// exceed the scenario's own corruption size.
std::vector<SweepRow> sweep(const Scenario& scenario, const DefenseConfig& base,
                            const SweepSpec& spec);

struct LabelStats {
    size_t finite_count = 0;
    size_t infinity_count = 0;
    double mean = 0.0;
    double median = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
    double p90 = 0.0;
    double p95 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct ScoreDistributions {
    LabelStats benign;
    LabelStats poison;
};

/// Composite-score statistics per label; +infinity sentinels are counted
/// separately from the finite statistics.
ScoreDistributions score_distributions(std::span<const DefenseResult> results,
                                       const Scenario& scenario);

// Artifact writers (deterministic bytes; no timestamps).
void write_heatmap_csv(const HeatmapMatrix& h, const std::filesystem::path& path);
void write_heatmap_svg(const HeatmapMatrix& h, const std::filesystem::path& path);
void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
void write_metrics_csv(const ProxyMetrics& m, const std::filesystem::path& path);
void write_distributions_csv(const ScoreDistributions& d, const std::filesystem::path& path);

}  // namespace bird
