#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bird/types.hpp"

namespace bird {

/// Snapshot of the work an index has performed since the last reset.
struct RetrievalCounters {
    uint64_t forward_passes = 0;
    uint64_t backward_passes = 0;
    uint64_t similarity_evals = 0;
    uint64_t cache_reads = 0;
};

/// Sort candidates by descending score, ties by ascending doc id, and keep
/// the best k. This is the one ranking rule every retrieval path goes
/// through.
RankedList select_top_k(std::vector<RankedEntry> candidates, size_t k, PivotKind pivot_kind,
                        std::string pivot_id);

/// Immutable brute-force retrieval index. Documents are stored in a
/// canonical id-sorted layout, so retrieval results never depend on
/// insertion order. Doc-doc similarities are quantized to float32 with a
/// fixed evaluation orientation; the optional pairwise cache stores exactly
/// those values, which makes cached and uncached retrieval bit-identical.
class CorpusIndex {
  public:
    static constexpr size_t kDefaultCacheBudget = size_t{1} << 30;  // bytes

    static CorpusIndex build(std::vector<EmbeddedDocument> docs, Metric metric);

    /// Copy of this index with the N x N similarity cache attached.
    /// Refuses (Errc::budget) if N*N*4 bytes exceed the budget.
    CorpusIndex with_pairwise_cache(size_t budget_bytes = kDefaultCacheBudget) const;

    bool has_pairwise_cache() const noexcept { return cache_ != nullptr; }

    size_t size() const noexcept;
    size_t dimension() const noexcept;
    Metric metric() const noexcept;

    bool contains(const std::string& doc_id) const;
    const EmbeddedDocument& doc(const std::string& doc_id) const;        // Errc::not_found
    const EmbeddedDocument& doc_at(size_t idx) const;

    /// Exact top-k by similarity to the query. k = 0 is invalid; k > N
    /// truncates to N.
    RankedList forward_retrieve(const Query& query, size_t k) const;

    /// Top-k with the pivot document itself excluded from candidates.
    RankedList backward_retrieve(const std::string& pivot_doc_id, size_t k) const;

    /// One backward retrieval per fw entry, in fw order. `parallelism` 0
    /// means hardware concurrency; results do not depend on it.
    std::vector<RankedList> batch_backward(const RankedList& fw, size_t k,
                                           unsigned parallelism = 0) const;

    /// Doc-doc similarity as retrieval sees it (float32-quantized).
    double pair_similarity(size_t i, size_t j) const;

    RetrievalCounters counters() const;
    void reset_counters() const;

  private:
    struct Storage;
    struct Counters {
        std::atomic<uint64_t> forward_passes{0};
        std::atomic<uint64_t> backward_passes{0};
        std::atomic<uint64_t> similarity_evals{0};
        std::atomic<uint64_t> cache_reads{0};
    };

    CorpusIndex() = default;

    RankedList backward_retrieve_idx(size_t pivot_idx, size_t k) const;

    std::shared_ptr<const Storage> storage_;
    std::shared_ptr<const std::vector<float>> cache_;  // N x N, row-major
    std::shared_ptr<Counters> counters_;
};

}  // namespace bird
