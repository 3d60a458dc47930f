#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lvmr/aural.hpp"
#include "lvmr/embedding.hpp"
#include "lvmr/timeline.hpp"

namespace lvmr {

enum class RetrievalStatus { ok, empty_intersection };

std::string_view to_string(RetrievalStatus status);

struct RetrievalEntry {
    std::string clip_id;
    TimeInterval interval;
    double fused_score;
    double visual_score;
    double aural_score;

    friend bool operator==(const RetrievalEntry&, const RetrievalEntry&) = default;
};

struct RetrievalResult {
    std::vector<RetrievalEntry> entries;
    RetrievalStatus status = RetrievalStatus::empty_intersection;
};

/// Keeps the clips present in both stream lists, scores each by the mean of
/// its two stream similarities and ranks by (fused desc, start asc, id asc).
/// An empty intersection is reported through `status`, not as an error.
RetrievalResult fuse(const std::vector<ScoredItem>& visual_topk, const std::vector<ScoredItem>& aural_topk,
                     const IntervalMap& intervals);

struct RetrievalConfig {
    std::size_t k_visual = 10;
    std::size_t k_semantic = 30;
    std::size_t k_aural = 10;
    std::size_t max_candidates = 100;
    TokenizerOptions tokenizer;
    /// Use candidate order when the reranker fails with a fallback-eligible error.
    bool fallback_to_identity = false;
};

/// Everything retrieval needs about one video. Both embedding lists must cover
/// every clip exactly once.
struct VideoAssets {
    std::vector<Clip> clips;
    std::vector<LabeledEmbedding<float>> clip_embeddings;
    std::vector<LabeledEmbedding<float>> subtitle_embeddings;
};

struct QueryInput {
    std::string text;
    EmbeddingVector visual_embedding;
    EmbeddingVector text_embedding;
};

/// Full dual-stream retrieval for one query over one video. Errors are
/// rethrown as StageError labelled "visual", "aural" or "fusion".
RetrievalResult retrieve(const VideoAssets& video, const QueryInput& query, const RetrievalConfig& config,
                         Reranker& reranker);

IntervalMap intervals_of(const std::vector<Clip>& clips);

/// Single-line predictions record:
/// {"video_id","query_id","results":[{"clip_id","start","end","fused_score","visual_score","aural_score"}]}
std::string serialize_prediction(std::string_view video_id, std::string_view query_id,
                                 const RetrievalResult& result);

}  // namespace lvmr
