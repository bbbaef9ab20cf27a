#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bird {

enum class Errc {
    invalid_input,
    not_found,
    build,
    parse,
    io,
    budget,
    calibration,
};

/// Single exception type for the whole library; code() tells callers what
/// went wrong without string matching.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

enum class Label { benign, poison };

enum class Metric { cosine, dot_product };

inline const char* to_string(Label l) { return l == Label::benign ? "benign" : "poison"; }
inline const char* to_string(Metric m) { return m == Metric::cosine ? "cosine" : "dot_product"; }

inline Label label_from_string(const std::string& s) {
    if (s == "benign") return Label::benign;
    if (s == "poison") return Label::poison;
    throw Error(Errc::parse, "unknown label: " + s);
}

inline Metric metric_from_string(const std::string& s) {
    if (s == "cosine") return Metric::cosine;
    if (s == "dot_product") return Metric::dot_product;
    throw Error(Errc::parse, "unknown metric: " + s);
}

/// One corpus entry: a pre-embedded document. Vectors are stored as
/// 32-bit floats; all similarity accumulation happens in 64-bit.
struct EmbeddedDocument {
    std::string id;
    std::vector<float> vector;
    Label label = Label::benign;
    bool gold = false;
    std::optional<std::string> target_query_id;
};

struct Query {
    std::string id;
    std::vector<float> vector;
    std::vector<std::string> answer_doc_ids;  // analytics only
};

struct RankedEntry {
    std::string doc_id;
    double score;
};

enum class PivotKind { query, document };

/// Ordered retrieval result. Scores are non-increasing; ties broken by
/// ascending doc id. Document pivots never appear in their own entries.
/// Document-pivot (backward) scores are quantized to float32 so cached
/// and uncached execution agree exactly.
struct RankedList {
    PivotKind pivot_kind = PivotKind::query;
    std::string pivot_id;
    std::vector<RankedEntry> entries;

    size_t size() const noexcept { return entries.size(); }
    bool contains(const std::string& doc_id) const {
        for (const auto& e : entries)
            if (e.doc_id == doc_id) return true;
        return false;
    }
};

inline bool is_finite_vector(std::span<const float> v) {
    for (float x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace bird
