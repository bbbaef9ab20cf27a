#include "bird/attack_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "bird/similarity.hpp"

namespace bird {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr uint64_t kBenignStream = 0x62656e69676e0001ull;
constexpr uint64_t kQueryStream = 0x7175657279000001ull;

// Gaussian draws via Box-Muller on top of mt19937_64, so generated vectors
// do not depend on the standard library's distribution internals.
class GaussianRng {
  public:
    explicit GaussianRng(uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    void fill(std::vector<double>& out, size_t n, double sigma) {
        out.resize(n);
        for (size_t i = 0; i < n; ++i) out[i] = sigma * next();
    }

  private:
    double uniform_open() {
        // (0, 1]: never 0, so log() stays finite.
        const uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

std::vector<float> normalized(const std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double inv = 1.0 / std::sqrt(sq);
    std::vector<float> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv);
    return out;
}

std::vector<double> unit_direction(GaussianRng& rng, size_t dim) {
    std::vector<double> v;
    rng.fill(v, dim, 1.0);
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

std::string indexed_id(const std::string& prefix, size_t i, int width) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix.c_str(), width, i);
    return buf;
}

}  // namespace

void AttackConfig::validate() const {
    if (m < 1) throw Error(Errc::invalid_input, "attack config: m must be >= 1");
    if (!(sigma_p >= 0.0)) throw Error(Errc::invalid_input, "attack config: sigma_p must be >= 0");
    if (!(sigma_b > 0.0)) throw Error(Errc::invalid_input, "attack config: sigma_b must be > 0");
    if (!(sigma_p < sigma_b)) {
        throw Error(Errc::invalid_input,
                    "attack config: sigma_p must be < sigma_b (poison clusters tighter than "
                    "the benign spread)");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(Errc::invalid_input, "attack config: alpha must lie in (0, 1]");
    }
    if (dim < 1) throw Error(Errc::invalid_input, "attack config: dim must be >= 1");
}

const Query& Scenario::query(const std::string& id) const {
    for (const auto& q : queries) {
        if (q.id == id) return q;
    }
    throw Error(Errc::not_found, "unknown query id: " + id);
}

std::vector<EmbeddedDocument> generate_benign(size_t n, const AttackConfig& cfg,
                                              const std::string& id_prefix) {
    if (n < 1) throw Error(Errc::invalid_input, "generate_benign: n must be >= 1");
    cfg.validate();
    GaussianRng rng(splitmix64(cfg.seed ^ kBenignStream));
    std::vector<EmbeddedDocument> docs;
    docs.reserve(n);
    std::vector<double> v;
    for (size_t i = 0; i < n; ++i) {
        rng.fill(v, cfg.dim, cfg.sigma_b);
        EmbeddedDocument d;
        d.id = indexed_id(id_prefix, i + 1, 5);
        d.vector = normalized(v);
        d.label = Label::benign;
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<EmbeddedDocument> generate_poisons(const Query& query, const AttackConfig& cfg) {
    cfg.validate();
    if (query.vector.size() != cfg.dim) {
        throw Error(Errc::invalid_input, "generate_poisons: query dimension " +
                                             std::to_string(query.vector.size()) +
                                             " does not match configured dim " +
                                             std::to_string(cfg.dim));
    }
    GaussianRng rng(splitmix64(cfg.seed ^ fnv1a(query.id)));
    const std::vector<double> u = unit_direction(rng, cfg.dim);

    std::vector<EmbeddedDocument> poisons;
    poisons.reserve(cfg.m);
    std::vector<double> noise;
    for (size_t j = 0; j < cfg.m; ++j) {
        rng.fill(noise, cfg.dim, cfg.sigma_p);
        std::vector<double> v(cfg.dim);
        for (size_t i = 0; i < cfg.dim; ++i) {
            v[i] = cfg.alpha * static_cast<double>(query.vector[i]) +
                   (1.0 - cfg.alpha) * u[i] + noise[i];
        }
        EmbeddedDocument d;
        d.id = "p_" + query.id + "_" + std::to_string(j + 1);
        d.vector = normalized(v);
        d.label = Label::poison;
        d.target_query_id = query.id;
        poisons.push_back(std::move(d));
    }
    return poisons;
}

std::vector<EmbeddedDocument> inject(std::span<const EmbeddedDocument> benign,
                                     std::span<const EmbeddedDocument> poisons) {
    std::unordered_set<std::string> seen;
    seen.reserve(benign.size() + poisons.size());
    std::vector<EmbeddedDocument> corpus;
    corpus.reserve(benign.size() + poisons.size());
    for (const auto& d : benign) {
        if (!seen.insert(d.id).second) {
            throw Error(Errc::invalid_input, "inject: duplicate id within benign set: " + d.id);
        }
        corpus.push_back(d);
    }
    for (const auto& d : poisons) {
        if (!seen.insert(d.id).second) {
            throw Error(Errc::invalid_input, "inject: id collision: " + d.id);
        }
        corpus.push_back(d);
    }
    return corpus;
}

namespace {

std::vector<EmbeddedDocument> pilot_subset_impl(const Query& query,
                                                std::span<const EmbeddedDocument> corpus,
                                                const AttackConfig* cfg, size_t top_benign,
                                                Metric metric) {
    std::vector<const EmbeddedDocument*> benign;
    std::vector<EmbeddedDocument> poisons;
    for (const auto& d : corpus) {
        if (d.label == Label::benign) {
            benign.push_back(&d);
        } else if (d.target_query_id && *d.target_query_id == query.id) {
            poisons.push_back(d);
        }
    }
    if (benign.size() < top_benign) {
        throw Error(Errc::invalid_input,
                    "build_pilot_subset: corpus has " + std::to_string(benign.size()) +
                        " benign documents, need " + std::to_string(top_benign));
    }

    std::vector<std::pair<double, const EmbeddedDocument*>> scored;
    scored.reserve(benign.size());
    for (const auto* d : benign) {
        scored.emplace_back(similarity(query.vector, d->vector, metric), d);
    }
    std::partial_sort(scored.begin(), scored.begin() + top_benign, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second->id < b.second->id;
                      });

    if (poisons.empty() && cfg) {
        poisons = generate_poisons(query, *cfg);
    }

    std::vector<EmbeddedDocument> subset;
    subset.reserve(top_benign + poisons.size());
    for (size_t i = 0; i < top_benign; ++i) subset.push_back(*scored[i].second);
    for (auto& p : poisons) subset.push_back(std::move(p));
    return subset;
}

}  // namespace

std::vector<EmbeddedDocument> build_pilot_subset(const Query& query,
                                                 std::span<const EmbeddedDocument> corpus,
                                                 const AttackConfig& cfg, size_t top_benign,
                                                 Metric metric) {
    return pilot_subset_impl(query, corpus, &cfg, top_benign, metric);
}

std::vector<EmbeddedDocument> build_pilot_subset(const Query& query,
                                                 std::span<const EmbeddedDocument> corpus,
                                                 size_t top_benign, Metric metric) {
    return pilot_subset_impl(query, corpus, nullptr, top_benign, metric);
}

Scenario generate_scenario(const ScenarioParams& params) {
    if (params.n_queries < 1) {
        throw Error(Errc::invalid_input, "generate_scenario: n_queries must be >= 1");
    }
    if (params.n_benign < 1) {
        throw Error(Errc::invalid_input, "generate_scenario: n_benign must be >= 1");
    }
    params.attack.validate();

    Scenario sc;
    sc.dim = params.attack.dim;
    sc.metric = params.metric;

    GaussianRng qrng(splitmix64(params.attack.seed ^ kQueryStream));
    std::vector<double> v;
    for (size_t i = 0; i < params.n_queries; ++i) {
        qrng.fill(v, params.attack.dim, 1.0);
        Query q;
        q.id = indexed_id("q", i + 1, 4);
        std::vector<double> vv = v;
        double sq = 0.0;
        for (double x : vv) sq += x * x;
        const double inv = 1.0 / std::sqrt(sq);
        q.vector.resize(vv.size());
        for (size_t d = 0; d < vv.size(); ++d) q.vector[d] = static_cast<float>(vv[d] * inv);
        sc.queries.push_back(std::move(q));
    }

    std::vector<EmbeddedDocument> benign = generate_benign(params.n_benign, params.attack);

    std::vector<EmbeddedDocument> poisons;
    poisons.reserve(params.n_queries * params.attack.m);
    for (const auto& q : sc.queries) {
        auto qp = generate_poisons(q, params.attack);
        std::move(qp.begin(), qp.end(), std::back_inserter(poisons));
    }

    // Gold document: the most query-similar benign, ties by ascending id.
    std::unordered_map<std::string, size_t> gold_hits;
    for (auto& q : sc.queries) {
        double best = -std::numeric_limits<double>::infinity();
        const EmbeddedDocument* gold = nullptr;
        for (const auto& b : benign) {
            const double s = similarity(q.vector, b.vector, params.metric);
            if (!gold || s > best || (s == best && b.id < gold->id)) {
                best = s;
                gold = &b;
            }
        }
        sc.gold_map.emplace(q.id, gold->id);
        q.answer_doc_ids = {gold->id};
        ++gold_hits[gold->id];
    }
    for (auto& b : benign) {
        if (gold_hits.count(b.id)) b.gold = true;
    }

    sc.corpus = inject(benign, poisons);
    return sc;
}

}  // namespace bird
