#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "bird/types.hpp"

namespace bird {

/// Documents present in both rankings, with 1-based relative ranks assigned
/// within the common set in each list's original order.
struct CommonSet {
    std::vector<std::string> ids;  // in fw order
    std::unordered_map<std::string, int> fw_rank;
    std::unordered_map<std::string, int> bw_rank;

    size_t size() const noexcept { return ids.size(); }
};

CommonSet common_set(const RankedList& fw, const RankedList& bw);

enum class RankBasis {
    common_set_relative,  // ranks re-assigned 1..|C| within the common set
    raw_positions,        // 1-based positions in the full lists (may leave [-1,1])
};

/// Spearman rank correlation over the common set; 0 when fewer than two
/// documents are shared. Symmetric.
double spearman(const RankedList& fw, const RankedList& bw,
                RankBasis basis = RankBasis::common_set_relative);

/// |intersection| / |union| of the two id sets; 0 when both lists are empty.
double jaccard(const RankedList& fw, const RankedList& bw);

/// Truncated, normalized rank-biased overlap at persistence p in (0,1).
/// Identical prefixes score 1; disjoint lists score 0.
double rbo(const RankedList& fw, const RankedList& bw, double p = 0.9);

}  // namespace bird
