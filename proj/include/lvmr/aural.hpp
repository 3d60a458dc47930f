#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lvmr/embedding.hpp"
#include "lvmr/timeline.hpp"

namespace lvmr {

struct TokenizerOptions {
    /// Drops a small fixed list of English function words. Off by default so the
    /// lexical heuristic matches any shared word.
    bool filter_stopwords = false;
};

/// Lowercased word tokens of a UTF-8 string. Any codepoint that is not a letter
/// or digit separates tokens; invalid UTF-8 bytes act as separators.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

/// Semantic stage of the aural stream: top-K subtitles by text-embedding similarity.
template <typename Scalar, typename QueryDerived>
std::vector<ScoredItem> aural_semantic_top_k(const std::vector<LabeledEmbedding<Scalar>>& subtitle_embeddings,
                                             const Eigen::MatrixBase<QueryDerived>& query_embedding,
                                             std::size_t k_semantic, const IntervalMap& clip_intervals)
{
    return top_k(subtitle_embeddings, query_embedding, k_semantic, clip_intervals);
}

/// Ids of clips whose subtitle shares at least one token with the query.
std::set<std::string> lexical_candidates(const std::vector<Clip>& clips, std::string_view query_text,
                                         const TokenizerOptions& options = {});

enum class CandidateOrigin { semantic, lexical, both };

std::string_view to_string(CandidateOrigin origin);

struct Candidate {
    std::string clip_id;
    std::string subtitle_text;
    double text_similarity;
    CandidateOrigin origin;
};

/// Ordered candidates with unique ids and finite similarities.
class CandidateSet {
  public:
    CandidateSet() = default;
    explicit CandidateSet(std::vector<Candidate> entries);

    const std::vector<Candidate>& entries() const noexcept { return m_entries; }
    std::size_t size() const noexcept { return m_entries.size(); }
    bool empty() const noexcept { return m_entries.empty(); }

  private:
    std::vector<Candidate> m_entries;
};

using ScoreMap = std::unordered_map<std::string, double>;

inline constexpr std::size_t kUncapped = std::numeric_limits<std::size_t>::max();

/// Union of the semantic list and the lexical matches. Semantic entries keep
/// their order; lexical-only entries follow by similarity with the standard
/// tie-break. `max_candidates` bounds the lexical tail only: semantic entries
/// are never dropped.
CandidateSet extend_candidates(const std::vector<ScoredItem>& semantic, const std::set<std::string>& lexical,
                               const ScoreMap& all_scores, const ClipIndex& clips,
                               std::size_t max_candidates = kUncapped);

struct RerankCandidate {
    std::string id;
    std::string text;
};

/// Reorders candidates by relevance to the query. Implementations may return
/// any list of strings; rerank_candidates repairs it.
class Reranker {
  public:
    virtual ~Reranker() = default;
    virtual std::vector<std::string> rerank(std::string_view query_text,
                                            const std::vector<RerankCandidate>& candidates) = 0;
};

class IdentityReranker final : public Reranker {
  public:
    std::vector<std::string> rerank(std::string_view query_text,
                                    const std::vector<RerankCandidate>& candidates) override;
};

/// Runs the reranker and repairs its answer: unknown and repeated ids are
/// dropped (with a warning), omitted ids are appended in candidate order, and
/// the list is cut to k_final. Scores are the candidates' text similarities.
///
/// Throws RerankError when the reranker fails; fallback_allowed() is set for
/// transport and response-format failures.
std::vector<ScoredItem> rerank_candidates(const CandidateSet& candidates, std::string_view query_text,
                                          Reranker& reranker, std::size_t k_final);

}  // namespace lvmr
