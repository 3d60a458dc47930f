#include "lvmr/aural.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lvmr/error.hpp"
#include "lvmr/log.hpp"

namespace lvmr {

std::set<std::string> lexical_candidates(const std::vector<Clip>& clips, std::string_view query_text,
                                         const TokenizerOptions& options)
{
    std::set<std::string> matches;
    const auto query_tokens = tokenize(query_text, options);
    if (query_tokens.empty()) {
        return matches;
    }
    const std::unordered_set<std::string> query_set(query_tokens.begin(), query_tokens.end());
    for (const auto& clip : clips) {
        for (const auto& token : tokenize(clip.subtitle_text, options)) {
            if (query_set.count(token) != 0) {
                matches.insert(clip.clip_id);
                break;
            }
        }
    }
    return matches;
}

std::string_view to_string(CandidateOrigin origin)
{
    switch (origin) {
    case CandidateOrigin::semantic:
        return "semantic";
    case CandidateOrigin::lexical:
        return "lexical";
    case CandidateOrigin::both:
        return "both";
    }
    return "unknown";
}

CandidateSet::CandidateSet(std::vector<Candidate> entries) : m_entries(std::move(entries))
{
    std::unordered_set<std::string_view> seen;
    for (const auto& entry : m_entries) {
        if (!seen.insert(entry.clip_id).second) {
            throw ContractError("duplicate candidate id " + entry.clip_id);
        }
        if (!std::isfinite(entry.text_similarity)) {
            throw ContractError("non-finite similarity for candidate " + entry.clip_id);
        }
    }
}

CandidateSet extend_candidates(const std::vector<ScoredItem>& semantic, const std::set<std::string>& lexical,
                               const ScoreMap& all_scores, const ClipIndex& clips, std::size_t max_candidates)
{
    auto clip_of = [&](const std::string& id) -> const Clip& {
        auto it = clips.find(id);
        if (it == clips.end()) {
            throw ContractError("unknown id " + id);
        }
        return *it->second;
    };

    std::vector<Candidate> entries;
    entries.reserve(semantic.size() + lexical.size());
    std::unordered_set<std::string_view> in_semantic;
    for (const auto& item : semantic) {
        const auto origin = lexical.count(item.clip_id) != 0 ? CandidateOrigin::both : CandidateOrigin::semantic;
        entries.push_back({item.clip_id, clip_of(item.clip_id).subtitle_text, item.score, origin});
        in_semantic.insert(item.clip_id);
    }

    struct Tail {
        const std::string* id;
        const Clip* clip;
        double score;
    };
    std::vector<Tail> tail;
    for (const auto& id : lexical) {
        if (in_semantic.count(id) != 0) {
            continue;
        }
        auto score = all_scores.find(id);
        if (score == all_scores.end()) {
            throw ContractError("lexical candidate " + id + " has no text similarity");
        }
        tail.push_back({&id, &clip_of(id), score->second});
    }
    std::sort(tail.begin(), tail.end(), [](const Tail& a, const Tail& b) {
        return ranks_before(a.score, a.clip->interval, *a.id, b.score, b.clip->interval, *b.id);
    });

    const auto room = max_candidates > entries.size() ? max_candidates - entries.size() : 0;
    if (tail.size() > room) {
        log_warning("candidate list capped: dropping " + std::to_string(tail.size() - room) +
                    " lexical-only candidates");
        tail.resize(room);
    }
    for (const auto& t : tail) {
        entries.push_back({*t.id, t.clip->subtitle_text, t.score, CandidateOrigin::lexical});
    }
    return CandidateSet(std::move(entries));
}

std::vector<std::string> IdentityReranker::rerank(std::string_view /*query_text*/,
                                                  const std::vector<RerankCandidate>& candidates)
{
    std::vector<std::string> ids;
    ids.reserve(candidates.size());
    for (const auto& c : candidates) {
        ids.push_back(c.id);
    }
    return ids;
}

std::vector<ScoredItem> rerank_candidates(const CandidateSet& candidates, std::string_view query_text,
                                          Reranker& reranker, std::size_t k_final)
{
    if (k_final == 0) {
        throw ContractError("k_final must be positive");
    }
    if (candidates.empty()) {
        return {};
    }

    std::vector<RerankCandidate> request;
    request.reserve(candidates.size());
    std::unordered_map<std::string_view, std::size_t> position;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& entry = candidates.entries()[i];
        request.push_back({entry.clip_id, entry.subtitle_text});
        position.emplace(entry.clip_id, i);
    }

    std::vector<std::string> ranking;
    try {
        ranking = reranker.rerank(query_text, request);
    } catch (const TransportError& e) {
        throw RerankError(std::string("reranker unavailable: ") + e.what(), true);
    } catch (const FormatError& e) {
        throw RerankError(std::string("reranker returned malformed response: ") + e.what(), true);
    }

    std::vector<bool> used(candidates.size(), false);
    std::vector<std::size_t> order;
    order.reserve(candidates.size());
    std::size_t unknown = 0;
    std::size_t repeated = 0;
    for (const auto& id : ranking) {
        auto it = position.find(id);
        if (it == position.end()) {
            ++unknown;
            continue;
        }
        if (used[it->second]) {
            ++repeated;
            continue;
        }
        used[it->second] = true;
        order.push_back(it->second);
    }
    std::size_t omitted = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!used[i]) {
            order.push_back(i);
            ++omitted;
        }
    }
    if (unknown + repeated + omitted != 0) {
        log_warning("repaired reranker output: " + std::to_string(unknown) + " unknown, " +
                    std::to_string(repeated) + " repeated, " + std::to_string(omitted) + " omitted ids");
    }

    std::vector<ScoredItem> result;
    const auto count = std::min(k_final, order.size());
    result.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& entry = candidates.entries()[order[i]];
        result.push_back({entry.clip_id, entry.text_similarity});
    }
    return result;
}

}  // namespace lvmr
