#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvmr/aural.hpp"
#include "lvmr/evaluation.hpp"
#include "lvmr/fusion.hpp"
#include "lvmr/providers.hpp"
#include "lvmr/timeline.hpp"

namespace lvmr {

struct ProviderConfig {
    std::string kind = "mock";  ///< mock | store | http
    std::size_t dim = 64;
    std::optional<std::uint64_t> seed;  ///< mock only; defaults to the run seed (+1 for the text stream)
    std::filesystem::path clips_store;
    std::filesystem::path texts_store;
    std::string url;
    HttpProviderOptions http;
};

struct RerankerConfig {
    std::string kind = "identity";  ///< identity | http
    std::string url;
    HttpPolicy policy;
};

/// Settings for a batch run. Every field can come from the JSON config file
/// and most can be overridden on the command line.
struct RunConfig {
    RetrievalConfig retrieval;
    EvaluationOptions evaluation;
    ProviderConfig visual;
    ProviderConfig text;
    RerankerConfig reranker;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  ///< 0 means one per logical CPU

    /// Throws ContractError when a K is zero or the threshold grid is invalid.
    void validate() const;
};

/// Relative store paths are resolved against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config, std::uint64_t default_seed);
std::unique_ptr<Reranker> make_reranker(const RerankerConfig& config);

struct QueryRequest {
    std::string video_id;
    std::string query_id;
    std::string text;
};

/// {"queries": [{"video_id", "query_id", "text"}]}; a blank file means no queries.
std::vector<QueryRequest> parse_queries(std::string_view json_text);

/// Embeds every video and query through the configured providers and runs
/// retrieval for each query on a bounded worker pool. Returns the predictions
/// file contents (one JSON line per query, in input order).
std::string run_retrieval(const std::map<std::string, std::vector<Clip>>& videos,
                          const std::vector<QueryRequest>& queries, const RunConfig& config);

/// Entry point shared by the executable and the tests. Machine-readable output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lvmr
