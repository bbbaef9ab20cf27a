#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bird/index.hpp"
#include "bird/rank_similarity.hpp"
#include "bird/types.hpp"

namespace bird {

enum class ConsistencyMetric { spearman, jaccard, rbo };

inline const char* to_string(ConsistencyMetric m) {
    switch (m) {
        case ConsistencyMetric::spearman: return "spearman";
        case ConsistencyMetric::jaccard: return "jaccard";
        case ConsistencyMetric::rbo: return "rbo";
    }
    return "?";
}

ConsistencyMetric consistency_metric_from_string(const std::string& s);

struct DefenseConfig {
    size_t k = 20;
    double epsilon = 2.5;
    ConsistencyMetric consistency = ConsistencyMetric::spearman;
    double rbo_p = 0.9;
    bool jaccard_as_distance = false;  // use 1 - jaccard as the consistency signal
    RankBasis spearman_basis = RankBasis::common_set_relative;
    double singularity_guard = 1e-9;
    double relevance_only_threshold = 0.85;
    double consistency_only_threshold = 0.85;

    void validate() const;
};

enum class Verdict { kept, filtered };

/// Per-document audit record produced by the defense.
struct ScoredDocument {
    std::string doc_id;
    size_t fw_rank = 0;  // 1-based position in the forward ranking
    double r_cr = 0.0;   // content relevance
    double r_cc = 0.0;   // context consistency
    double score = 0.0;  // composite; +infinity marks the singular case
    Verdict verdict = Verdict::filtered;
};

struct AuditCounts {
    size_t benign_kept = 0;
    size_t benign_filtered = 0;
    size_t poison_kept = 0;
    size_t poison_filtered = 0;
};

struct DefenseResult {
    std::string query_id;
    std::vector<ScoredDocument> scored;    // forward order
    std::vector<std::string> clean_ids;    // kept docs, forward order
    AuditCounts audit;
};

/// Query-document similarity (the forward-ranking relevance signal).
double content_relevance(const Query& query, const EmbeddedDocument& doc, Metric metric);

/// r_cr / (1 - r_cc); +infinity when the denominator falls below `guard`.
double composite_score(double r_cr, double r_cc, double guard);

/// Ranking similarity between the forward and one backward list under the
/// configured metric.
double consistency_score(const RankedList& fw, const RankedList& bw, const DefenseConfig& cfg);

/// One forward retrieval, k backward retrievals, per-document scoring, and
/// threshold filtering. Requires k <= index size.
DefenseResult defend(const CorpusIndex& index, const Query& query, const DefenseConfig& cfg);

enum class AblationMode { relevance_only, consistency_only, composite };

AblationMode ablation_mode_from_string(const std::string& s);
const char* to_string(AblationMode m);

/// Same pipeline with a single-signal keep rule (relevance_only keeps
/// r_cr <= threshold, consistency_only keeps r_cc <= threshold); composite
/// delegates to defend.
DefenseResult defend_ablated(const CorpusIndex& index, const Query& query,
                             const DefenseConfig& cfg, AblationMode mode);

enum class CalibrationPolicy { quantile, fixed };

struct CalibrationConfig {
    CalibrationPolicy policy = CalibrationPolicy::quantile;
    double q = 0.95;            // target fraction of poison filtered
    double fixed_epsilon = 2.5;
    double floor_epsilon = 2.5; // used when every poison score is +infinity
};

/// Threshold from a validation-set score distribution. Quantile policy
/// returns the largest sample value that leaves at most (1-q) of the finite
/// poison scores at or below it. +infinity samples are always filtered and
/// only count toward the total.
double calibrate_threshold(std::span<const double> poison_scores,
                           std::span<const double> benign_scores, const CalibrationConfig& cfg);

inline constexpr double kInfiniteScore = std::numeric_limits<double>::infinity();

}  // namespace bird
