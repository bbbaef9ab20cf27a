#include "bird/defense.hpp"

#include <algorithm>
#include <cmath>

#include "bird/similarity.hpp"

namespace bird {

ConsistencyMetric consistency_metric_from_string(const std::string& s) {
    if (s == "spearman") return ConsistencyMetric::spearman;
    if (s == "jaccard") return ConsistencyMetric::jaccard;
    if (s == "rbo") return ConsistencyMetric::rbo;
    throw Error(Errc::parse, "unknown consistency metric: " + s);
}

const char* to_string(AblationMode m) {
    switch (m) {
        case AblationMode::relevance_only: return "relevance_only";
        case AblationMode::consistency_only: return "consistency_only";
        case AblationMode::composite: return "composite";
    }
    return "?";
}

AblationMode ablation_mode_from_string(const std::string& s) {
    if (s == "relevance_only") return AblationMode::relevance_only;
    if (s == "consistency_only") return AblationMode::consistency_only;
    if (s == "composite") return AblationMode::composite;
    throw Error(Errc::parse, "unknown ablation mode: " + s);
}

void DefenseConfig::validate() const {
    if (k < 1) throw Error(Errc::invalid_input, "defense config: k must be >= 1");
    if (!(epsilon > 0.0)) throw Error(Errc::invalid_input, "defense config: epsilon must be > 0");
    if (!(singularity_guard > 0.0 && singularity_guard < 1.0)) {
        throw Error(Errc::invalid_input, "defense config: singularity guard must lie in (0, 1)");
    }
    if (!(rbo_p > 0.0 && rbo_p < 1.0)) {
        throw Error(Errc::invalid_input, "defense config: rbo p must lie in (0, 1)");
    }
}

double content_relevance(const Query& query, const EmbeddedDocument& doc, Metric metric) {
    return similarity(query.vector, doc.vector, metric);
}

double composite_score(double r_cr, double r_cc, double guard) {
    const double denom = 1.0 - r_cc;
    if (denom < guard) return kInfiniteScore;
    return r_cr / denom;
}

double consistency_score(const RankedList& fw, const RankedList& bw, const DefenseConfig& cfg) {
    switch (cfg.consistency) {
        case ConsistencyMetric::spearman:
            return spearman(fw, bw, cfg.spearman_basis);
        case ConsistencyMetric::jaccard: {
            const double j = jaccard(fw, bw);
            return cfg.jaccard_as_distance ? 1.0 - j : j;
        }
        case ConsistencyMetric::rbo:
            return rbo(fw, bw, cfg.rbo_p);
    }
    throw Error(Errc::invalid_input, "unknown consistency metric");
}

namespace {

DefenseResult run_pipeline(const CorpusIndex& index, const Query& query,
                           const DefenseConfig& cfg) {
    cfg.validate();
    if (cfg.k > index.size()) {
        throw Error(Errc::invalid_input, "defend: k=" + std::to_string(cfg.k) +
                                             " exceeds corpus size N=" +
                                             std::to_string(index.size()));
    }
    const RankedList fw = index.forward_retrieve(query, cfg.k);
    const std::vector<RankedList> bws = index.batch_backward(fw, cfg.k);

    DefenseResult res;
    res.query_id = query.id;
    res.scored.reserve(fw.entries.size());
    for (size_t i = 0; i < fw.entries.size(); ++i) {
        ScoredDocument sd;
        sd.doc_id = fw.entries[i].doc_id;
        sd.fw_rank = i + 1;
        sd.r_cr = fw.entries[i].score;
        sd.r_cc = consistency_score(fw, bws[i], cfg);
        sd.score = composite_score(sd.r_cr, sd.r_cc, cfg.singularity_guard);
        res.scored.push_back(std::move(sd));
    }
    return res;
}

void apply_verdicts(DefenseResult& res, const CorpusIndex& index, const DefenseConfig& cfg,
                    AblationMode mode) {
    res.clean_ids.clear();
    res.audit = AuditCounts{};
    for (auto& sd : res.scored) {
        bool keep = false;
        switch (mode) {
            case AblationMode::composite:
                keep = sd.score <= cfg.epsilon;
                break;
            case AblationMode::relevance_only:
                keep = sd.r_cr <= cfg.relevance_only_threshold;
                break;
            case AblationMode::consistency_only:
                keep = sd.r_cc <= cfg.consistency_only_threshold;
                break;
        }
        sd.verdict = keep ? Verdict::kept : Verdict::filtered;
        if (keep) res.clean_ids.push_back(sd.doc_id);
        const Label label = index.doc(sd.doc_id).label;
        if (label == Label::benign) {
            keep ? ++res.audit.benign_kept : ++res.audit.benign_filtered;
        } else {
            keep ? ++res.audit.poison_kept : ++res.audit.poison_filtered;
        }
    }
}

}  // namespace

DefenseResult defend(const CorpusIndex& index, const Query& query, const DefenseConfig& cfg) {
    DefenseResult res = run_pipeline(index, query, cfg);
    apply_verdicts(res, index, cfg, AblationMode::composite);
    return res;
}

DefenseResult defend_ablated(const CorpusIndex& index, const Query& query,
                             const DefenseConfig& cfg, AblationMode mode) {
    DefenseResult res = run_pipeline(index, query, cfg);
    apply_verdicts(res, index, cfg, mode);
    return res;
}

double calibrate_threshold(std::span<const double> poison_scores,
                           std::span<const double> benign_scores, const CalibrationConfig& cfg) {
    (void)benign_scores;  // informational; the policy reads the poison distribution
    if (cfg.policy == CalibrationPolicy::fixed) {
        if (!(cfg.fixed_epsilon > 0.0)) {
            throw Error(Errc::calibration, "calibrate: fixed epsilon must be > 0");
        }
        return cfg.fixed_epsilon;
    }
    if (!(cfg.q > 0.0 && cfg.q <= 1.0)) {
        throw Error(Errc::calibration, "calibrate: q must lie in (0, 1]");
    }
    if (poison_scores.empty()) {
        throw Error(Errc::calibration, "calibrate: no poison scores to calibrate against");
    }

    std::vector<double> finite;
    finite.reserve(poison_scores.size());
    for (double s : poison_scores) {
        if (std::isfinite(s)) finite.push_back(s);
    }
    if (finite.empty()) {
        // Every sample is the +infinity sentinel; any finite threshold
        // filters them all.
        return cfg.floor_epsilon;
    }
    std::sort(finite.begin(), finite.end());

    // Largest threshold leaving at most (1-q) of all samples at or below it.
    const auto allowed = static_cast<size_t>(
        std::floor((1.0 - cfg.q) * static_cast<double>(poison_scores.size())));

    double eps;
    if (allowed >= finite.size()) {
        eps = finite.back();
    } else {
        // Walk down to the largest sample whose inclusive count stays within
        // the allowance (duplicates can push the count past it).
        size_t i = allowed;  // count(<= finite[i-1]) >= i, so start just above
        while (i > 0) {
            const auto count = static_cast<size_t>(
                std::upper_bound(finite.begin(), finite.end(), finite[i - 1]) - finite.begin());
            if (count <= allowed) break;
            --i;
        }
        if (i == 0) {
            eps = std::nextafter(finite.front(), -kInfiniteScore);
        } else {
            eps = finite[i - 1];
        }
    }
    if (!(eps > 0.0)) {
        throw Error(Errc::calibration,
                    "calibrate: quantile policy cannot produce a positive threshold "
                    "(lowest poison scores are non-positive)");
    }
    return eps;
}

}  // namespace bird
