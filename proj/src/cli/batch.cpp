#include <atomic>
#include <exception>
#include <thread>

#include <json.hpp>

#include "lvmr/cli.hpp"
#include "lvmr/error.hpp"

namespace lvmr {

using nlohmann::json;

std::vector<QueryRequest> parse_queries(std::string_view json_text)
{
    if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return {};
    }
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed queries file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("queries") || !doc["queries"].is_array()) {
        throw FormatError("queries file: expected {\"queries\": [...]}");
    }
    std::vector<QueryRequest> queries;
    for (std::size_t i = 0; i < doc["queries"].size(); ++i) {
        const auto& q = doc["queries"][i];
        const auto where = "query " + std::to_string(i);
        if (!q.is_object()) {
            throw FormatError(where + ": must be an object");
        }
        QueryRequest request;
        for (auto [key, target] : {std::pair{"video_id", &request.video_id}, std::pair{"query_id", &request.query_id},
                                   std::pair{"text", &request.text}}) {
            auto it = q.find(key);
            if (it == q.end()) {
                throw FormatError(where + ": missing required field '" + key + "'");
            }
            if (it->is_string()) {
                *target = it->get<std::string>();
            } else if (it->is_number_integer() && std::string_view(key) == "query_id") {
                *target = std::to_string(it->get<long long>());
            } else {
                throw FormatError(where + ": field '" + key + "' must be a string");
            }
        }
        queries.push_back(std::move(request));
    }
    return queries;
}

namespace {

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

void expect_count(std::size_t got, std::size_t want, const char* stage)
{
    if (got != want) {
        throw StageError(stage, "provider returned " + std::to_string(got) + " vectors for " + std::to_string(want) +
                                    " inputs");
    }
}

VideoAssets embed_video(const std::vector<Clip>& clips, EmbeddingProvider& visual, EmbeddingProvider& text)
{
    VideoAssets assets;
    assets.clips = clips;
    std::vector<std::string> ids;
    std::vector<std::string> subtitles;
    for (const auto& clip : clips) {
        ids.push_back(clip.clip_id);
        subtitles.push_back(clip.subtitle_text);
    }
    auto clip_vectors = in_stage("visual", [&] { return visual.embed_clips(ids); });
    expect_count(clip_vectors.size(), ids.size(), "visual");
    auto subtitle_vectors = in_stage("aural", [&] { return text.embed_texts(subtitles); });
    expect_count(subtitle_vectors.size(), ids.size(), "aural");
    for (std::size_t i = 0; i < clips.size(); ++i) {
        assets.clip_embeddings.push_back({ids[i], std::move(clip_vectors[i])});
        assets.subtitle_embeddings.push_back({ids[i], std::move(subtitle_vectors[i])});
    }
    return assets;
}

}  // namespace

std::string run_retrieval(const std::map<std::string, std::vector<Clip>>& videos,
                          const std::vector<QueryRequest>& queries, const RunConfig& config)
{
    config.validate();
    if (queries.empty()) {
        return {};
    }
    auto visual = make_provider(config.visual, config.seed);
    auto text = make_provider(config.text, config.seed + 1);
    auto reranker = make_reranker(config.reranker);

    std::map<std::string, VideoAssets> assets;
    for (const auto& q : queries) {
        if (assets.count(q.video_id) != 0) {
            continue;
        }
        auto video = videos.find(q.video_id);
        if (video == videos.end()) {
            throw ContractError("query " + q.query_id + " refers to unknown video " + q.video_id);
        }
        assets.emplace(q.video_id, embed_video(video->second, *visual, *text));
    }

    std::vector<std::string> texts;
    texts.reserve(queries.size());
    for (const auto& q : queries) {
        texts.push_back(q.text);
    }
    auto query_visual = in_stage("visual", [&] { return visual->embed_texts(texts); });
    expect_count(query_visual.size(), texts.size(), "visual");
    auto query_text = in_stage("aural", [&] { return text->embed_texts(texts); });
    expect_count(query_text.size(), texts.size(), "aural");

    std::vector<std::string> lines(queries.size());
    std::vector<std::exception_ptr> failures(queries.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (auto i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
            try {
                const QueryInput input{queries[i].text, query_visual[i], query_text[i]};
                auto result = retrieve(assets.at(queries[i].video_id), input, config.retrieval, *reranker);
                lines[i] = serialize_prediction(queries[i].video_id, queries[i].query_id, result);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    auto workers = config.workers != 0 ? config.workers : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min<std::size_t>(workers, queries.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace lvmr
