#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lvmr/error.hpp"
#include "lvmr/timeline.hpp"

namespace lvmr {

/// Dense embedding column vector. Providers emit and persist Embedding<float>;
/// similarity math always upcasts to double.
template <typename Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using EmbeddingVector = Embedding<float>;

template <typename Scalar>
struct LabeledEmbedding {
    std::string clip_id;
    Embedding<Scalar> vector;
};

struct ScoredItem {
    std::string clip_id;
    double score;

    friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

using IntervalMap = std::unordered_map<std::string, TimeInterval>;

/// Throws ContractError when the vector is empty or has a NaN/inf component.
template <typename Derived>
void validate_embedding(const Eigen::MatrixBase<Derived>& v)
{
    if (v.size() == 0) {
        throw ContractError("empty embedding");
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(static_cast<double>(v(i)))) {
            throw ContractError("non-finite embedding component at index " + std::to_string(i));
        }
    }
}

/// (a . b) / (|a| |b|) in double precision, clamped to [-1, 1].
/// Throws ContractError on dimension mismatch or a zero-norm operand.
///
/// Accumulation is a plain sequential loop so the result does not depend on
/// the SIMD width Eigen was compiled for.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
{
    if (a.size() != b.size()) {
        throw ContractError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const auto x = static_cast<double>(a(i));
        const auto y = static_cast<double>(b(i));
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw ContractError("zero-norm vector");
    }
    const double cos = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    if (!std::isfinite(cos)) {
        throw ContractError("non-finite similarity");
    }
    return std::clamp(cos, -1.0, 1.0);
}

/// Strict total order used everywhere results are ranked: higher score first,
/// then earlier interval start, then lexicographically smaller id.
inline bool ranks_before(double score_a, const TimeInterval& interval_a, std::string_view id_a,
                         double score_b, const TimeInterval& interval_b, std::string_view id_b)
{
    if (score_a != score_b) {
        return score_a > score_b;
    }
    if (interval_a.start_s() != interval_b.start_s()) {
        return interval_a.start_s() < interval_b.start_s();
    }
    return id_a < id_b;
}

inline const TimeInterval& interval_of(const IntervalMap& intervals, const std::string& clip_id)
{
    auto it = intervals.find(clip_id);
    if (it == intervals.end()) {
        throw ContractError("unknown id " + clip_id);
    }
    return it->second;
}

/// Sorts in place by ranks_before. Every id must be present in `intervals`.
inline void sort_ranked(std::vector<ScoredItem>& items, const IntervalMap& intervals)
{
    for (const auto& item : items) {
        interval_of(intervals, item.clip_id);
    }
    std::stable_sort(items.begin(), items.end(), [&](const ScoredItem& a, const ScoredItem& b) {
        return ranks_before(a.score, intervals.at(a.clip_id), a.clip_id, b.score,
                            intervals.at(b.clip_id), b.clip_id);
    });
}

/// Scores every item against `query` and returns the best min(k, |items|).
/// Similarity errors are rethrown annotated with the offending clip id.
template <typename Scalar, typename QueryDerived>
std::vector<ScoredItem> top_k(const std::vector<LabeledEmbedding<Scalar>>& items,
                              const Eigen::MatrixBase<QueryDerived>& query, std::size_t k,
                              const IntervalMap& clip_intervals)
{
    if (k == 0) {
        throw ContractError("k must be positive");
    }
    std::vector<ScoredItem> scored;
    scored.reserve(items.size());
    for (const auto& item : items) {
        try {
            interval_of(clip_intervals, item.clip_id);
            scored.push_back({item.clip_id, cosine_similarity(item.vector, query)});
        } catch (const ContractError& e) {
            throw ContractError("clip " + item.clip_id + ": " + e.what());
        }
    }
    sort_ranked(scored, clip_intervals);
    if (scored.size() > k) {
        scored.resize(k);
    }
    return scored;
}

}  // namespace lvmr
