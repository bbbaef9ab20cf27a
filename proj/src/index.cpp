#include "bird/index.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bird/kernels.hpp"

namespace bird {

struct CorpusIndex::Storage {
    std::vector<EmbeddedDocument> docs;  // sorted by id
    std::vector<float> matrix;           // row-major, row i = docs[i].vector
    std::vector<double> norms;           // sqrt(dot(v, v))
    std::unordered_map<std::string, size_t> id_to_idx;
    size_t dim = 0;
    Metric metric = Metric::cosine;
};

RankedList select_top_k(std::vector<RankedEntry> candidates, size_t k, PivotKind pivot_kind,
                        std::string pivot_id) {
    const auto better = [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    };
    const size_t keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), better);
    candidates.resize(keep);
    RankedList out;
    out.pivot_kind = pivot_kind;
    out.pivot_id = std::move(pivot_id);
    out.entries = std::move(candidates);
    return out;
}

CorpusIndex CorpusIndex::build(std::vector<EmbeddedDocument> docs, Metric metric) {
    if (docs.empty()) {
        throw Error(Errc::build, "build_index: empty document set");
    }
    std::sort(docs.begin(), docs.end(),
              [](const EmbeddedDocument& a, const EmbeddedDocument& b) { return a.id < b.id; });

    std::string dup_ids;
    for (size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].id == docs[i - 1].id) {
            if (!dup_ids.empty()) dup_ids += ", ";
            dup_ids += docs[i].id;
        }
    }
    if (!dup_ids.empty()) {
        throw Error(Errc::build, "build_index: duplicate document ids: " + dup_ids);
    }

    const size_t dim = docs.front().vector.size();
    if (dim == 0) {
        throw Error(Errc::build, "build_index: zero-dimension vector in document " + docs[0].id);
    }
    std::string bad_dims;
    for (const auto& d : docs) {
        if (d.vector.size() != dim) {
            if (!bad_dims.empty()) bad_dims += ", ";
            bad_dims += d.id;
        }
    }
    if (!bad_dims.empty()) {
        throw Error(Errc::build, "build_index: dimension mismatch (expected " +
                                     std::to_string(dim) + ") in documents: " + bad_dims);
    }

    auto storage = std::make_shared<Storage>();
    storage->dim = dim;
    storage->metric = metric;
    storage->matrix.resize(docs.size() * dim);
    storage->norms.resize(docs.size());
    storage->id_to_idx.reserve(docs.size());

    for (size_t i = 0; i < docs.size(); ++i) {
        const auto& d = docs[i];
        if (!is_finite_vector(d.vector)) {
            throw Error(Errc::build, "build_index: non-finite component in document " + d.id);
        }
        std::copy(d.vector.begin(), d.vector.end(), storage->matrix.begin() + i * dim);
        const double sq = kernels::active().dot(d.vector.data(), d.vector.data(), dim);
        if (metric == Metric::cosine && sq == 0.0) {
            throw Error(Errc::build, "build_index: all-zero vector under cosine in document " + d.id);
        }
        storage->norms[i] = std::sqrt(sq);
        storage->id_to_idx.emplace(d.id, i);
    }
    storage->docs = std::move(docs);

    CorpusIndex idx;
    idx.storage_ = std::move(storage);
    idx.counters_ = std::make_shared<Counters>();
    return idx;
}

size_t CorpusIndex::size() const noexcept { return storage_->docs.size(); }
size_t CorpusIndex::dimension() const noexcept { return storage_->dim; }
Metric CorpusIndex::metric() const noexcept { return storage_->metric; }

bool CorpusIndex::contains(const std::string& doc_id) const {
    return storage_->id_to_idx.count(doc_id) != 0;
}

const EmbeddedDocument& CorpusIndex::doc(const std::string& doc_id) const {
    auto it = storage_->id_to_idx.find(doc_id);
    if (it == storage_->id_to_idx.end()) {
        throw Error(Errc::not_found, "unknown document id: " + doc_id);
    }
    return storage_->docs[it->second];
}

const EmbeddedDocument& CorpusIndex::doc_at(size_t idx) const { return storage_->docs.at(idx); }

double CorpusIndex::pair_similarity(size_t i, size_t j) const {
    const auto& s = *storage_;
    const double ab =
        kernels::active().dot(s.matrix.data() + i * s.dim, s.matrix.data() + j * s.dim, s.dim);
    counters_->similarity_evals.fetch_add(1, std::memory_order_relaxed);
    if (s.metric == Metric::dot_product) {
        return static_cast<double>(static_cast<float>(ab));
    }
    // Fixed orientation (lower storage index first) keeps the value
    // independent of which side is the pivot.
    const size_t lo = std::min(i, j), hi = std::max(i, j);
    return static_cast<double>(static_cast<float>(ab / (s.norms[lo] * s.norms[hi])));
}

RankedList CorpusIndex::forward_retrieve(const Query& query, size_t k) const {
    const auto& s = *storage_;
    if (k == 0) {
        throw Error(Errc::invalid_input, "forward_retrieve: k must be >= 1");
    }
    if (query.vector.size() != s.dim) {
        throw Error(Errc::invalid_input, "forward_retrieve: query dimension " +
                                             std::to_string(query.vector.size()) +
                                             " does not match corpus dimension " +
                                             std::to_string(s.dim));
    }
    if (!is_finite_vector(query.vector)) {
        throw Error(Errc::invalid_input, "forward_retrieve: non-finite query component");
    }
    double query_norm = 1.0;
    if (s.metric == Metric::cosine) {
        const double qq =
            kernels::active().dot(query.vector.data(), query.vector.data(), s.dim);
        if (qq == 0.0) {
            throw Error(Errc::invalid_input, "forward_retrieve: all-zero query under cosine");
        }
        query_norm = std::sqrt(qq);
    }

    const size_t n = s.docs.size();
    std::vector<double> dots(n);
    kernels::active().dot_batch(query.vector.data(), s.matrix.data(), n, s.dim, dots.data());
    counters_->forward_passes.fetch_add(1, std::memory_order_relaxed);
    counters_->similarity_evals.fetch_add(n, std::memory_order_relaxed);

    std::vector<RankedEntry> candidates(n);
    for (size_t i = 0; i < n; ++i) {
        const double score =
            s.metric == Metric::cosine ? dots[i] / (query_norm * s.norms[i]) : dots[i];
        candidates[i] = {s.docs[i].id, score};
    }
    return select_top_k(std::move(candidates), k, PivotKind::query, query.id);
}

RankedList CorpusIndex::backward_retrieve_idx(size_t pivot_idx, size_t k) const {
    const auto& s = *storage_;
    if (k == 0) {
        throw Error(Errc::invalid_input, "backward_retrieve: k must be >= 1");
    }
    const size_t n = s.docs.size();
    std::vector<RankedEntry> candidates;
    candidates.reserve(n - 1);
    counters_->backward_passes.fetch_add(1, std::memory_order_relaxed);

    if (cache_) {
        const float* row = cache_->data() + pivot_idx * n;
        for (size_t j = 0; j < n; ++j) {
            if (j == pivot_idx) continue;
            candidates.push_back({s.docs[j].id, static_cast<double>(row[j])});
        }
        counters_->cache_reads.fetch_add(n - 1, std::memory_order_relaxed);
    } else {
        std::vector<double> dots(n);
        kernels::active().dot_batch(s.matrix.data() + pivot_idx * s.dim, s.matrix.data(), n,
                                    s.dim, dots.data());
        counters_->similarity_evals.fetch_add(n - 1, std::memory_order_relaxed);
        for (size_t j = 0; j < n; ++j) {
            if (j == pivot_idx) continue;
            double score;
            if (s.metric == Metric::dot_product) {
                score = static_cast<double>(static_cast<float>(dots[j]));
            } else {
                const size_t lo = std::min(pivot_idx, j), hi = std::max(pivot_idx, j);
                score = static_cast<double>(
                    static_cast<float>(dots[j] / (s.norms[lo] * s.norms[hi])));
            }
            candidates.push_back({s.docs[j].id, score});
        }
    }
    return select_top_k(std::move(candidates), k, PivotKind::document,
                        s.docs[pivot_idx].id);
}

RankedList CorpusIndex::backward_retrieve(const std::string& pivot_doc_id, size_t k) const {
    auto it = storage_->id_to_idx.find(pivot_doc_id);
    if (it == storage_->id_to_idx.end()) {
        throw Error(Errc::not_found, "backward_retrieve: unknown pivot id: " + pivot_doc_id);
    }
    return backward_retrieve_idx(it->second, k);
}

std::vector<RankedList> CorpusIndex::batch_backward(const RankedList& fw, size_t k,
                                                    unsigned parallelism) const {
    std::vector<size_t> pivots;
    pivots.reserve(fw.entries.size());
    for (const auto& e : fw.entries) {
        auto it = storage_->id_to_idx.find(e.doc_id);
        if (it == storage_->id_to_idx.end()) {
            throw Error(Errc::not_found, "batch_backward: unknown pivot id: " + e.doc_id);
        }
        pivots.push_back(it->second);
    }

    std::vector<RankedList> out(pivots.size());
    if (parallelism == 0) {
        parallelism = std::max(1u, std::thread::hardware_concurrency());
    }
    const unsigned workers =
        static_cast<unsigned>(std::min<size_t>(parallelism, pivots.size()));

    if (workers <= 1) {
        for (size_t i = 0; i < pivots.size(); ++i) {
            out[i] = backward_retrieve_idx(pivots[i], k);
        }
        return out;
    }

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (size_t i = w; i < pivots.size(); i += workers) {
                out[i] = backward_retrieve_idx(pivots[i], k);
            }
        });
    }
    for (auto& t : threads) t.join();
    return out;
}

CorpusIndex CorpusIndex::with_pairwise_cache(size_t budget_bytes) const {
    const auto& s = *storage_;
    const size_t n = s.docs.size();
    const size_t required = n * n * sizeof(float);
    if (required > budget_bytes) {
        throw Error(Errc::budget, "pairwise cache for N=" + std::to_string(n) + " requires " +
                                      std::to_string(required) + " bytes, budget is " +
                                      std::to_string(budget_bytes));
    }

    auto cache = std::make_shared<std::vector<float>>(n * n);
    std::vector<double> dots(n);
    for (size_t i = 0; i < n; ++i) {
        const size_t count = n - i;
        kernels::active().dot_batch(s.matrix.data() + i * s.dim, s.matrix.data() + i * s.dim,
                                    count, s.dim, dots.data());
        counters_->similarity_evals.fetch_add(count, std::memory_order_relaxed);
        for (size_t j = i; j < n; ++j) {
            float v;
            if (s.metric == Metric::dot_product) {
                v = static_cast<float>(dots[j - i]);
            } else {
                v = static_cast<float>(dots[j - i] / (s.norms[i] * s.norms[j]));
            }
            (*cache)[i * n + j] = v;
            (*cache)[j * n + i] = v;
        }
    }

    CorpusIndex idx;
    idx.storage_ = storage_;
    idx.cache_ = std::move(cache);
    idx.counters_ = counters_;
    return idx;
}

RetrievalCounters CorpusIndex::counters() const {
    RetrievalCounters c;
    c.forward_passes = counters_->forward_passes.load(std::memory_order_relaxed);
    c.backward_passes = counters_->backward_passes.load(std::memory_order_relaxed);
    c.similarity_evals = counters_->similarity_evals.load(std::memory_order_relaxed);
    c.cache_reads = counters_->cache_reads.load(std::memory_order_relaxed);
    return c;
}

void CorpusIndex::reset_counters() const {
    counters_->forward_passes.store(0, std::memory_order_relaxed);
    counters_->backward_passes.store(0, std::memory_order_relaxed);
    counters_->similarity_evals.store(0, std::memory_order_relaxed);
    counters_->cache_reads.store(0, std::memory_order_relaxed);
}

}  // namespace bird
