#include "lvmr/fusion.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lvmr/error.hpp"
#include "lvmr/log.hpp"

namespace lvmr {

std::string_view to_string(RetrievalStatus status)
{
    return status == RetrievalStatus::ok ? "ok" : "empty_intersection";
}

IntervalMap intervals_of(const std::vector<Clip>& clips)
{
    IntervalMap intervals;
    intervals.reserve(clips.size());
    for (const auto& clip : clips) {
        if (!intervals.emplace(clip.clip_id, clip.interval).second) {
            throw ContractError("duplicate clip id " + clip.clip_id);
        }
    }
    return intervals;
}

RetrievalResult fuse(const std::vector<ScoredItem>& visual_topk, const std::vector<ScoredItem>& aural_topk,
                     const IntervalMap& intervals)
{
    std::unordered_map<std::string_view, double> aural_scores;
    for (const auto& item : aural_topk) {
        interval_of(intervals, item.clip_id);
        if (!aural_scores.emplace(item.clip_id, item.score).second) {
            throw ContractError("duplicate id " + item.clip_id + " in aural list");
        }
    }

    RetrievalResult result;
    std::unordered_set<std::string_view> seen;
    for (const auto& item : visual_topk) {
        const auto& interval = interval_of(intervals, item.clip_id);
        if (!seen.insert(item.clip_id).second) {
            throw ContractError("duplicate id " + item.clip_id + " in visual list");
        }
        auto match = aural_scores.find(item.clip_id);
        if (match == aural_scores.end()) {
            continue;
        }
        result.entries.push_back(
            {item.clip_id, interval, (item.score + match->second) / 2.0, item.score, match->second});
    }

    std::stable_sort(result.entries.begin(), result.entries.end(),
                     [](const RetrievalEntry& a, const RetrievalEntry& b) {
                         return ranks_before(a.fused_score, a.interval, a.clip_id, b.fused_score, b.interval,
                                             b.clip_id);
                     });
    result.status = result.entries.empty() ? RetrievalStatus::empty_intersection : RetrievalStatus::ok;
    return result;
}

namespace {

void check_coverage(const std::vector<Clip>& clips, const std::vector<LabeledEmbedding<float>>& embeddings)
{
    std::unordered_set<std::string_view> clip_ids;
    for (const auto& clip : clips) {
        clip_ids.insert(clip.clip_id);
    }
    std::unordered_set<std::string_view> covered;
    for (const auto& e : embeddings) {
        if (clip_ids.count(e.clip_id) == 0) {
            throw ContractError("embedding for unknown clip " + e.clip_id);
        }
        if (!covered.insert(e.clip_id).second) {
            throw ContractError("duplicate embedding for id " + e.clip_id);
        }
    }
    for (const auto& clip : clips) {
        if (covered.count(clip.clip_id) == 0) {
            throw ContractError("unknown id " + clip.clip_id);
        }
    }
}

template <typename F>
auto in_stage(const char* stage, F&& f)
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.what());
    }
}

}  // namespace

RetrievalResult retrieve(const VideoAssets& video, const QueryInput& query, const RetrievalConfig& config,
                         Reranker& reranker)
{
    const auto intervals = intervals_of(video.clips);

    auto visual = in_stage("visual", [&] {
        check_coverage(video.clips, video.clip_embeddings);
        return top_k(video.clip_embeddings, query.visual_embedding, config.k_visual, intervals);
    });

    auto aural = in_stage("aural", [&] {
        check_coverage(video.clips, video.subtitle_embeddings);
        auto semantic =
            aural_semantic_top_k(video.subtitle_embeddings, query.text_embedding, config.k_semantic, intervals);

        ScoreMap all_scores;
        all_scores.reserve(video.subtitle_embeddings.size());
        for (const auto& e : video.subtitle_embeddings) {
            all_scores.emplace(e.clip_id, cosine_similarity(e.vector, query.text_embedding));
        }
        auto lexical = lexical_candidates(video.clips, query.text, config.tokenizer);
        const auto clips = index_clips(video.clips);
        auto candidates = extend_candidates(semantic, lexical, all_scores, clips, config.max_candidates);
        try {
            return rerank_candidates(candidates, query.text, reranker, config.k_aural);
        } catch (const RerankError& e) {
            if (!config.fallback_to_identity || !e.fallback_allowed()) {
                throw;
            }
            log_warning(std::string(e.what()) + "; falling back to candidate order");
            IdentityReranker identity;
            return rerank_candidates(candidates, query.text, identity, config.k_aural);
        }
    });

    return in_stage("fusion", [&] { return fuse(visual, aural, intervals); });
}

std::string serialize_prediction(std::string_view video_id, std::string_view query_id,
                                 const RetrievalResult& result)
{
    nlohmann::json results = nlohmann::json::array();
    for (const auto& e : result.entries) {
        results.push_back({{"clip_id", e.clip_id},
                           {"start", e.interval.start_s()},
                           {"end", e.interval.end_s()},
                           {"fused_score", e.fused_score},
                           {"visual_score", e.visual_score},
                           {"aural_score", e.aural_score}});
    }
    nlohmann::json record = {
        {"video_id", std::string(video_id)}, {"query_id", std::string(query_id)}, {"results", std::move(results)}};
    return record.dump();
}

}  // namespace lvmr
