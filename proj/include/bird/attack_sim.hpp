#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bird/types.hpp"

namespace bird {

/// Knobs of the synthetic poisoning attack. Poisons interpolate toward the
/// target query (alpha) with a per-query shared offset direction and a small
/// cluster spread (sigma_p); benign documents are isotropic on the unit
/// sphere. sigma_p < sigma_b is the defining geometry: poison clusters are
/// tighter than the benign spread.
struct AttackConfig {
    size_t m = 5;            // poisons per target query
    double sigma_p = 0.05;   // poison cluster spread
    double alpha = 0.9;      // pull toward the query, in (0, 1]
    double sigma_b = 1.0;    // benign dispersion
    size_t dim = 64;
    uint64_t seed = 42;

    void validate() const;
};

struct Scenario {
    size_t dim = 64;
    Metric metric = Metric::cosine;
    std::vector<Query> queries;
    std::vector<EmbeddedDocument> corpus;
    std::map<std::string, std::string> gold_map;  // query id -> gold benign doc id

    const Query& query(const std::string& id) const;  // Errc::not_found
};

/// n isotropic unit vectors, labeled benign. Pure function of (n, cfg,
/// id_prefix).
std::vector<EmbeddedDocument> generate_benign(size_t n, const AttackConfig& cfg,
                                              const std::string& id_prefix = "b");

/// m poisons for one query: normalize(alpha*q + (1-alpha)*u + sigma_p*noise)
/// with u drawn once per query. Pure function of (query, cfg).
std::vector<EmbeddedDocument> generate_poisons(const Query& query, const AttackConfig& cfg);

/// Union of the two document sets; throws Errc::invalid_input naming any
/// colliding id.
std::vector<EmbeddedDocument> inject(std::span<const EmbeddedDocument> benign,
                                     std::span<const EmbeddedDocument> poisons);

/// The per-query pilot subset: the top_benign most query-similar benign
/// documents from the corpus plus the poisons targeting the query (generated
/// fresh when the corpus has none).
std::vector<EmbeddedDocument> build_pilot_subset(const Query& query,
                                                 std::span<const EmbeddedDocument> corpus,
                                                 const AttackConfig& cfg,
                                                 size_t top_benign = 20,
                                                 Metric metric = Metric::cosine);

/// Same subset using only the poisons already present in the corpus
/// (possibly none).
std::vector<EmbeddedDocument> build_pilot_subset(const Query& query,
                                                 std::span<const EmbeddedDocument> corpus,
                                                 size_t top_benign = 20,
                                                 Metric metric = Metric::cosine);

struct ScenarioParams {
    size_t n_queries = 100;
    size_t n_benign = 2000;  // shared benign pool size
    Metric metric = Metric::cosine;
    AttackConfig attack;
};

/// Full synthetic scenario: query set, shared benign pool, m poisons per
/// query, and per-query gold documents (the most query-similar benign).
Scenario generate_scenario(const ScenarioParams& params);

}  // namespace bird
