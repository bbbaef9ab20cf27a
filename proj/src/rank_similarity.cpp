#include "bird/rank_similarity.hpp"

#include <algorithm>
#include <unordered_set>

namespace bird {

CommonSet common_set(const RankedList& fw, const RankedList& bw) {
    std::unordered_map<std::string, int> bw_pos;  // 1-based position in bw
    bw_pos.reserve(bw.entries.size());
    for (size_t i = 0; i < bw.entries.size(); ++i) {
        bw_pos.emplace(bw.entries[i].doc_id, static_cast<int>(i + 1));
    }

    CommonSet cs;
    int next_fw_rank = 0;
    for (const auto& e : fw.entries) {
        if (bw_pos.count(e.doc_id)) {
            cs.ids.push_back(e.doc_id);
            cs.fw_rank.emplace(e.doc_id, ++next_fw_rank);
        }
    }
    // Relative bw ranks: order of the common ids by bw position.
    std::vector<std::string> by_bw = cs.ids;
    std::sort(by_bw.begin(), by_bw.end(), [&](const std::string& a, const std::string& b) {
        return bw_pos.at(a) < bw_pos.at(b);
    });
    for (size_t i = 0; i < by_bw.size(); ++i) {
        cs.bw_rank.emplace(by_bw[i], static_cast<int>(i + 1));
    }
    return cs;
}

double spearman(const RankedList& fw, const RankedList& bw, RankBasis basis) {
    const CommonSet cs = common_set(fw, bw);
    const size_t n = cs.size();
    if (n < 2) return 0.0;

    std::unordered_map<std::string, int> fw_raw, bw_raw;
    if (basis == RankBasis::raw_positions) {
        for (size_t i = 0; i < fw.entries.size(); ++i)
            fw_raw.emplace(fw.entries[i].doc_id, static_cast<int>(i + 1));
        for (size_t i = 0; i < bw.entries.size(); ++i)
            bw_raw.emplace(bw.entries[i].doc_id, static_cast<int>(i + 1));
    }

    double d2_sum = 0.0;
    for (const auto& id : cs.ids) {
        const int rf = basis == RankBasis::common_set_relative ? cs.fw_rank.at(id) : fw_raw.at(id);
        const int rb = basis == RankBasis::common_set_relative ? cs.bw_rank.at(id) : bw_raw.at(id);
        const double d = static_cast<double>(rf - rb);
        d2_sum += d * d;
    }
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * d2_sum / (nn * (nn * nn - 1.0));
}

double jaccard(const RankedList& fw, const RankedList& bw) {
    std::unordered_set<std::string> a, b;
    for (const auto& e : fw.entries) a.insert(e.doc_id);
    for (const auto& e : bw.entries) b.insert(e.doc_id);
    size_t inter = 0;
    for (const auto& id : a) inter += b.count(id);
    const size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double rbo(const RankedList& fw, const RankedList& bw, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(Errc::invalid_input, "rbo: p must lie in (0, 1)");
    }
    const size_t depth = std::min(fw.entries.size(), bw.entries.size());
    if (depth == 0) return 0.0;

    std::unordered_set<std::string> seen_fw, seen_bw;
    size_t overlap = 0;
    double numer = 0.0, denom = 0.0, weight = 1.0;  // weight = p^(d-1)
    for (size_t d = 0; d < depth; ++d) {
        const std::string& f = fw.entries[d].doc_id;
        const std::string& b = bw.entries[d].doc_id;
        if (f == b) {
            ++overlap;
        } else {
            if (seen_bw.count(f)) ++overlap;
            if (seen_fw.count(b)) ++overlap;
        }
        seen_fw.insert(f);
        seen_bw.insert(b);
        numer += weight * static_cast<double>(overlap) / static_cast<double>(d + 1);
        denom += weight;
        weight *= p;
    }
    return numer / denom;
}

}  // namespace bird
