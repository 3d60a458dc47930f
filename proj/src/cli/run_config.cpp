#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "lvmr/cli.hpp"
#include "lvmr/error.hpp"
#include "lvmr/file_io.hpp"

namespace lvmr {

using nlohmann::json;

void RunConfig::validate() const
{
    if (retrieval.k_visual == 0 || retrieval.k_semantic == 0 || retrieval.k_aural == 0) {
        throw ContractError("K values must be at least 1");
    }
    if (retrieval.max_candidates == 0) {
        throw ContractError("max_candidates must be at least 1");
    }
    if (evaluation.ks.empty()) {
        throw ContractError("at least one evaluation K is required");
    }
    for (auto k : evaluation.ks) {
        if (k == 0) {
            throw ContractError("K values must be at least 1");
        }
    }
    validate_threshold_grid(evaluation.thresholds);
}

namespace {

void check_keys(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!object.is_object()) {
        throw FormatError(where + " must be an object");
    }
    for (const auto& [key, value] : object.items()) {
        bool known = false;
        for (auto name : allowed) {
            known = known || key == name;
        }
        if (!known) {
            throw FormatError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const json& object, const char* key, T& target, const std::string& where)
{
    auto it = object.find(key);
    if (it == object.end()) {
        return;
    }
    try {
        target = it->get<T>();
    } catch (const json::exception& e) {
        throw FormatError(where + ": bad value for '" + key + "': " + e.what());
    }
}

void read_policy(const json& object, HttpPolicy& policy, const std::string& where)
{
    long long timeout_ms = policy.timeout.count();
    long long backoff_ms = policy.initial_backoff.count();
    read(object, "timeout_ms", timeout_ms, where);
    read(object, "backoff_ms", backoff_ms, where);
    read(object, "retries", policy.retries, where);
    policy.timeout = std::chrono::milliseconds(timeout_ms);
    policy.initial_backoff = std::chrono::milliseconds(backoff_ms);
    std::string token_env;
    read(object, "bearer_token_env", token_env, where);
    if (!token_env.empty()) {
        if (const char* token = std::getenv(token_env.c_str())) {
            policy.bearer_token = token;
        }
    }
}

ProviderConfig read_provider(const json& object, const std::filesystem::path& base_dir, const std::string& where)
{
    check_keys(object,
               {"provider", "dim", "seed", "clips", "texts", "url", "timeout_ms", "backoff_ms", "retries",
                "bearer_token_env", "batch_size", "max_in_flight"},
               where);
    ProviderConfig config;
    read(object, "provider", config.kind, where);
    read(object, "dim", config.dim, where);
    if (object.contains("seed")) {
        std::uint64_t seed = 0;
        read(object, "seed", seed, where);
        config.seed = seed;
    }
    std::string clips;
    std::string texts;
    read(object, "clips", clips, where);
    read(object, "texts", texts, where);
    if (!clips.empty()) {
        config.clips_store = base_dir / clips;
    }
    if (!texts.empty()) {
        config.texts_store = base_dir / texts;
    }
    read(object, "url", config.url, where);
    read_policy(object, config.http.policy, where);
    read(object, "batch_size", config.http.batch_size, where);
    read(object, "max_in_flight", config.http.max_in_flight, where);
    if (config.kind != "mock" && config.kind != "store" && config.kind != "http") {
        throw FormatError(where + ": unknown provider '" + config.kind + "'");
    }
    return config;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed config: ") + e.what());
    }
    const std::string where = "config";
    check_keys(doc,
               {"k_visual", "k_semantic", "k_aural", "max_candidates", "stopwords", "fallback_to_identity", "mode",
                "comparison", "averaging", "thresholds", "ks", "strict_join", "seed", "workers", "visual", "text",
                "reranker"},
               where);

    RunConfig config;
    read(doc, "k_visual", config.retrieval.k_visual, where);
    read(doc, "k_semantic", config.retrieval.k_semantic, where);
    read(doc, "k_aural", config.retrieval.k_aural, where);
    read(doc, "max_candidates", config.retrieval.max_candidates, where);
    read(doc, "stopwords", config.retrieval.tokenizer.filter_stopwords, where);
    read(doc, "fallback_to_identity", config.retrieval.fallback_to_identity, where);

    std::string text;
    if (doc.contains("mode")) {
        read(doc, "mode", text, where);
        config.evaluation.match.mode = parse_overlap_mode(text);
    }
    if (doc.contains("comparison")) {
        read(doc, "comparison", text, where);
        config.evaluation.match.comparison = parse_match_comparison(text);
    }
    if (doc.contains("averaging")) {
        read(doc, "averaging", text, where);
        config.evaluation.match.averaging = parse_averaging(text);
    }
    read(doc, "thresholds", config.evaluation.thresholds, where);
    read(doc, "ks", config.evaluation.ks, where);
    read(doc, "strict_join", config.evaluation.strict_join, where);
    read(doc, "seed", config.seed, where);
    read(doc, "workers", config.workers, where);

    if (doc.contains("visual")) {
        config.visual = read_provider(doc["visual"], base_dir, "config.visual");
    }
    if (doc.contains("text")) {
        config.text = read_provider(doc["text"], base_dir, "config.text");
    }
    if (doc.contains("reranker")) {
        const auto& r = doc["reranker"];
        check_keys(r, {"kind", "url", "timeout_ms", "backoff_ms", "retries", "bearer_token_env"}, "config.reranker");
        read(r, "kind", config.reranker.kind, "config.reranker");
        read(r, "url", config.reranker.url, "config.reranker");
        read_policy(r, config.reranker.policy, "config.reranker");
    }
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    return parse_run_config(read_file(path), path.parent_path());
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config, std::uint64_t default_seed)
{
    if (config.kind == "mock") {
        return std::make_unique<MockProvider>(config.seed.value_or(default_seed), config.dim);
    }
    if (config.kind == "store") {
        std::shared_ptr<const EmbeddingStore> clips;
        std::shared_ptr<const EmbeddingStore> texts;
        if (!config.clips_store.empty()) {
            clips = std::make_shared<const EmbeddingStore>(load_store(config.clips_store));
        }
        if (!config.texts_store.empty()) {
            texts = std::make_shared<const EmbeddingStore>(load_store(config.texts_store));
        }
        return std::make_unique<StoreProvider>(std::move(clips), std::move(texts));
    }
    if (config.kind == "http") {
        return std::make_unique<HttpProvider>(config.url, config.dim, config.http);
    }
    throw ContractError("unknown provider '" + config.kind + "'");
}

std::unique_ptr<Reranker> make_reranker(const RerankerConfig& config)
{
    if (config.kind == "identity") {
        return std::make_unique<IdentityReranker>();
    }
    if (config.kind == "http") {
        return std::make_unique<HttpReranker>(config.url, config.policy);
    }
    throw ContractError("unknown reranker '" + config.kind + "'");
}

}  // namespace lvmr
