#include "bird/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "bird/index.hpp"
#include "bird/io_util.hpp"

namespace bird {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::unordered_map<std::string, Label> label_map(const Scenario& sc) {
    std::unordered_map<std::string, Label> m;
    m.reserve(sc.corpus.size());
    for (const auto& d : sc.corpus) m.emplace(d.id, d.label);
    return m;
}

}  // namespace

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "epsilon") return SweepAxis::epsilon;
    if (s == "k") return SweepAxis::k;
    if (s == "m") return SweepAxis::m;
    if (s == "metric") return SweepAxis::metric;
    throw Error(Errc::parse, "unknown sweep axis: " + s);
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::epsilon: return "epsilon";
        case SweepAxis::k: return "k";
        case SweepAxis::m: return "m";
        case SweepAxis::metric: return "metric";
    }
    return "?";
}

HeatmapMatrix heatmap(const Scenario& scenario, size_t k, size_t pilot_benign) {
    if (scenario.queries.empty()) {
        throw Error(Errc::invalid_input, "heatmap: scenario has no queries");
    }
    if (k == 0) {
        throw Error(Errc::invalid_input, "heatmap: k must be >= 1");
    }

    HeatmapMatrix h;
    h.k = k;
    h.num_queries = scenario.queries.size();
    h.forward_column.assign(k, 0.0);
    h.backward_rows.assign(k * k, 0.0);

    for (const auto& q : scenario.queries) {
        auto subset = build_pilot_subset(q, scenario.corpus, pilot_benign, scenario.metric);
        std::unordered_map<std::string, Label> labels;
        labels.reserve(subset.size());
        for (const auto& d : subset) labels.emplace(d.id, d.label);

        const CorpusIndex index = CorpusIndex::build(std::move(subset), scenario.metric);
        const RankedList fw = index.forward_retrieve(q, k);
        for (size_t r = 0; r < fw.entries.size(); ++r) {
            if (labels.at(fw.entries[r].doc_id) == Label::poison) {
                h.forward_column[r] += 1.0;
            }
        }
        const auto bws = index.batch_backward(fw, k);
        for (size_t i = 0; i < bws.size(); ++i) {
            for (size_t j = 0; j < bws[i].entries.size(); ++j) {
                if (labels.at(bws[i].entries[j].doc_id) == Label::poison) {
                    h.backward_rows[i * k + j] += 1.0;
                }
            }
        }
    }

    const double nq = static_cast<double>(h.num_queries);
    for (auto& v : h.forward_column) v /= nq;
    for (auto& v : h.backward_rows) v /= nq;
    return h;
}

ProxyMetrics proxy_metrics(std::span<const DefenseResult> results, const Scenario& scenario) {
    const auto labels = label_map(scenario);
    std::unordered_set<std::string> known_queries;
    for (const auto& q : scenario.queries) known_queries.insert(q.id);

    size_t leaked_queries = 0;
    size_t gold_queries = 0, gold_kept = 0;
    size_t filtered_total = 0, filtered_poison = 0;
    size_t topk_poison = 0;
    size_t benign_kept_total = 0;

    for (const auto& res : results) {
        if (!known_queries.count(res.query_id)) {
            throw Error(Errc::not_found, "proxy_metrics: unknown query id " + res.query_id);
        }
        bool leaked = false;
        for (const auto& sd : res.scored) {
            auto it = labels.find(sd.doc_id);
            if (it == labels.end()) {
                throw Error(Errc::not_found, "proxy_metrics: unknown doc id " + sd.doc_id);
            }
            const bool poison = it->second == Label::poison;
            const bool kept = sd.verdict == Verdict::kept;
            if (poison) {
                ++topk_poison;
                if (kept) leaked = true;
                else ++filtered_poison;
            } else if (kept) {
                ++benign_kept_total;
            }
            if (!kept) ++filtered_total;
        }
        if (leaked) ++leaked_queries;

        auto g = scenario.gold_map.find(res.query_id);
        if (g != scenario.gold_map.end()) {
            ++gold_queries;
            for (const auto& id : res.clean_ids) {
                if (id == g->second) {
                    ++gold_kept;
                    break;
                }
            }
        }
    }

    if (results.empty()) {
        throw Error(Errc::invalid_input, "proxy_metrics: no results");
    }

    ProxyMetrics m;
    const double nq = static_cast<double>(results.size());
    m.poison_leak_rate = static_cast<double>(leaked_queries) / nq;
    m.gold_retention =
        gold_queries == 0 ? 1.0 : static_cast<double>(gold_kept) / static_cast<double>(gold_queries);
    m.filter_precision = filtered_total == 0
                             ? 1.0
                             : static_cast<double>(filtered_poison) /
                                   static_cast<double>(filtered_total);
    m.filter_recall = topk_poison == 0 ? 1.0
                                       : static_cast<double>(filtered_poison) /
                                             static_cast<double>(topk_poison);
    m.mean_benign_kept = static_cast<double>(benign_kept_total) / nq;
    return m;
}

namespace {

CorpusIndex build_index_maybe_cached(std::vector<EmbeddedDocument> docs, Metric metric) {
    CorpusIndex index = CorpusIndex::build(std::move(docs), metric);
    try {
        return index.with_pairwise_cache();
    } catch (const Error& e) {
        if (e.code() == Errc::budget) return index;  // brute force instead
        throw;
    }
}

std::vector<DefenseResult> defend_all(const CorpusIndex& index, const Scenario& scenario,
                                      const DefenseConfig& cfg) {
    std::vector<DefenseResult> results;
    results.reserve(scenario.queries.size());
    for (const auto& q : scenario.queries) {
        results.push_back(defend(index, q, cfg));
    }
    return results;
}

std::vector<EmbeddedDocument> truncate_poisons(const Scenario& scenario, size_t m) {
    std::unordered_map<std::string, size_t> kept_per_query;
    std::vector<EmbeddedDocument> docs;
    docs.reserve(scenario.corpus.size());
    for (const auto& d : scenario.corpus) {
        if (d.label == Label::poison) {
            const std::string target = d.target_query_id.value_or("");
            if (kept_per_query[target] >= m) continue;
            ++kept_per_query[target];
        }
        docs.push_back(d);
    }
    return docs;
}

size_t min_poisons_per_target(const Scenario& scenario) {
    std::unordered_map<std::string, size_t> counts;
    for (const auto& d : scenario.corpus) {
        if (d.label == Label::poison) ++counts[d.target_query_id.value_or("")];
    }
    if (counts.empty()) return 0;
    size_t lo = SIZE_MAX;
    for (const auto& [_, c] : counts) lo = std::min(lo, c);
    return lo;
}

}  // namespace

std::vector<SweepRow> sweep(const Scenario& scenario, const DefenseConfig& base,
                            const SweepSpec& spec) {
    base.validate();
    if (spec.axis != SweepAxis::metric && spec.values.empty()) {
        throw Error(Errc::invalid_input, "sweep: empty value range");
    }

    std::vector<SweepRow> rows;

    if (spec.axis == SweepAxis::metric) {
        const CorpusIndex index = build_index_maybe_cached(scenario.corpus, scenario.metric);
        for (ConsistencyMetric cm : {ConsistencyMetric::spearman, ConsistencyMetric::jaccard,
                                     ConsistencyMetric::rbo}) {
            DefenseConfig cfg = base;
            cfg.consistency = cm;
            const auto results = defend_all(index, scenario, cfg);
            rows.push_back({"metric", to_string(cm), proxy_metrics(results, scenario)});
        }
        return rows;
    }

    if (spec.axis == SweepAxis::m) {
        const size_t available = min_poisons_per_target(scenario);
        for (double v : spec.values) {
            const double rounded = std::round(v);
            if (v < 0.0 || rounded != v) {
                throw Error(Errc::invalid_input, "sweep: m values must be non-negative integers");
            }
            const auto m = static_cast<size_t>(rounded);
            if (m > available) {
                throw Error(Errc::invalid_input,
                            "sweep: m=" + std::to_string(m) + " exceeds the scenario's " +
                                std::to_string(available) + " poisons per query");
            }
            const CorpusIndex index =
                build_index_maybe_cached(truncate_poisons(scenario, m), scenario.metric);
            const auto results = defend_all(index, scenario, base);
            rows.push_back({"m", fmt(static_cast<double>(m)), proxy_metrics(results, scenario)});
        }
        return rows;
    }

    const CorpusIndex index = build_index_maybe_cached(scenario.corpus, scenario.metric);
    for (double v : spec.values) {
        DefenseConfig cfg = base;
        if (spec.axis == SweepAxis::epsilon) {
            if (!(v > 0.0)) {
                throw Error(Errc::invalid_input, "sweep: epsilon values must be > 0");
            }
            cfg.epsilon = v;
        } else {  // k
            const double rounded = std::round(v);
            if (v < 1.0 || rounded != v) {
                throw Error(Errc::invalid_input, "sweep: k values must be positive integers");
            }
            cfg.k = static_cast<size_t>(rounded);
        }
        const auto results = defend_all(index, scenario, cfg);
        rows.push_back({to_string(spec.axis), fmt(v), proxy_metrics(results, scenario)});
    }
    return rows;
}

namespace {

LabelStats stats_of(std::vector<double> finite, size_t inf_count) {
    LabelStats s;
    s.infinity_count = inf_count;
    s.finite_count = finite.size();
    if (finite.empty()) return s;
    std::sort(finite.begin(), finite.end());
    double sum = 0.0;
    for (double v : finite) sum += v;
    const auto at = [&](double p) {
        const size_t idx = static_cast<size_t>(p * static_cast<double>(finite.size() - 1));
        return finite[idx];
    };
    s.mean = sum / static_cast<double>(finite.size());
    s.median = at(0.5);
    s.p25 = at(0.25);
    s.p75 = at(0.75);
    s.p90 = at(0.90);
    s.p95 = at(0.95);
    s.min = finite.front();
    s.max = finite.back();
    return s;
}

}  // namespace

ScoreDistributions score_distributions(std::span<const DefenseResult> results,
                                       const Scenario& scenario) {
    const auto labels = label_map(scenario);
    std::vector<double> benign, poison;
    size_t benign_inf = 0, poison_inf = 0;
    for (const auto& res : results) {
        for (const auto& sd : res.scored) {
            auto it = labels.find(sd.doc_id);
            if (it == labels.end()) {
                throw Error(Errc::not_found, "score_distributions: unknown doc id " + sd.doc_id);
            }
            const bool is_poison = it->second == Label::poison;
            if (std::isinf(sd.score)) {
                is_poison ? ++poison_inf : ++benign_inf;
            } else {
                (is_poison ? poison : benign).push_back(sd.score);
            }
        }
    }
    ScoreDistributions d;
    d.benign = stats_of(std::move(benign), benign_inf);
    d.poison = stats_of(std::move(poison), poison_inf);
    return d;
}

void write_heatmap_csv(const HeatmapMatrix& h, const std::filesystem::path& path) {
    std::string out = "row";
    for (size_t j = 1; j <= h.k; ++j) out += ",rank_" + std::to_string(j);
    out += '\n';
    out += "forward";
    for (size_t j = 0; j < h.k; ++j) out += "," + fmt(h.forward_column[j]);
    out += '\n';
    for (size_t i = 0; i < h.k; ++i) {
        out += "backward_" + std::to_string(i + 1);
        for (size_t j = 0; j < h.k; ++j) out += "," + fmt(h.backward_at(i, j));
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_heatmap_svg(const HeatmapMatrix& h, const std::filesystem::path& path) {
    const int cell = 18;
    const int left = 96;   // row labels
    const int top = 48;    // title + column header
    const int gap = 24;    // between forward column and backward matrix
    const int k = static_cast<int>(h.k);
    const int width = left + cell + gap + k * cell + 24;
    const int height = top + k * cell + 40;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(left) +
           "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">rank-position poison "
           "frequency (" +
           std::to_string(h.num_queries) + " queries)</text>\n";

    const auto cell_rect = [&](int x, int y, double v) {
        const int c = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(v, 0.0, 1.0))));
        return "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
               std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"rgb(255," +
               std::to_string(c) + "," + std::to_string(c) + ")\" stroke=\"#ccc\"/>\n";
    };

    svg += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(top - 6) +
           "\" font-family=\"sans-serif\" font-size=\"10\">fw</text>\n";
    svg += "<text x=\"" + std::to_string(left + cell + gap) + "\" y=\"" + std::to_string(top - 6) +
           "\" font-family=\"sans-serif\" font-size=\"10\">backward rank 1.." +
           std::to_string(h.k) + "</text>\n";

    for (int i = 0; i < k; ++i) {
        const int y = top + i * cell;
        svg += "<text x=\"6\" y=\"" + std::to_string(y + cell - 5) +
               "\" font-family=\"sans-serif\" font-size=\"10\">rank " + std::to_string(i + 1) +
               "</text>\n";
        svg += cell_rect(left, y, h.forward_column[static_cast<size_t>(i)]);
        for (int j = 0; j < k; ++j) {
            svg += cell_rect(left + cell + gap + j * cell, y,
                             h.backward_at(static_cast<size_t>(i), static_cast<size_t>(j)));
        }
    }
    svg += "</svg>\n";
    write_file_atomic(path, svg);
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
    std::string out =
        "axis,value,poison_leak_rate,gold_retention,filter_precision,filter_recall,"
        "mean_benign_kept\n";
    for (const auto& r : rows) {
        out += r.axis + "," + r.value + "," + fmt(r.metrics.poison_leak_rate) + "," +
               fmt(r.metrics.gold_retention) + "," + fmt(r.metrics.filter_precision) + "," +
               fmt(r.metrics.filter_recall) + "," + fmt(r.metrics.mean_benign_kept) + "\n";
    }
    write_file_atomic(path, out);
}

void write_metrics_csv(const ProxyMetrics& m, const std::filesystem::path& path) {
    std::string out =
        "poison_leak_rate,gold_retention,filter_precision,filter_recall,mean_benign_kept\n";
    out += fmt(m.poison_leak_rate) + "," + fmt(m.gold_retention) + "," + fmt(m.filter_precision) +
           "," + fmt(m.filter_recall) + "," + fmt(m.mean_benign_kept) + "\n";
    write_file_atomic(path, out);
}

void write_distributions_csv(const ScoreDistributions& d, const std::filesystem::path& path) {
    std::string out =
        "label,finite_count,infinity_count,mean,median,p25,p75,p90,p95,min,max\n";
    const auto row = [&](const char* label, const LabelStats& s) {
        out += std::string(label) + "," + std::to_string(s.finite_count) + "," +
               std::to_string(s.infinity_count) + "," + fmt(s.mean) + "," + fmt(s.median) + "," +
               fmt(s.p25) + "," + fmt(s.p75) + "," + fmt(s.p90) + "," + fmt(s.p95) + "," +
               fmt(s.min) + "," + fmt(s.max) + "\n";
    };
    row("benign", d.benign);
    row("poison", d.poison);
    write_file_atomic(path, out);
}

}  // namespace bird
