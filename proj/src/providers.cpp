#include "lvmr/providers.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <json.hpp>

#include "lvmr/error.hpp"

namespace lvmr {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

EmbeddingVector mock_embedding(std::uint64_t seed, std::string_view input, std::size_t dim)
{
    constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    std::uint64_t state = fnv1a64(input) ^ (seed * kGolden);
    if (state == 0) {
        state = kGolden;
    }

    std::vector<double> draws(dim);
    double norm_sq = 0.0;
    for (auto& x : draws) {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        const std::uint64_t r = state * 0x2545F4914F6CDD1DULL;
        const double unit = static_cast<double>(r >> 11) * 0x1.0p-53;
        x = 2.0 * unit - 1.0;
        norm_sq += x * x;
    }

    EmbeddingVector v(static_cast<Eigen::Index>(dim));
    if (norm_sq == 0.0) {
        v.setZero();
        v(0) = 1.0F;
        return v;
    }
    const double norm = std::sqrt(norm_sq);
    for (std::size_t i = 0; i < dim; ++i) {
        v(static_cast<Eigen::Index>(i)) = static_cast<float>(draws[i] / norm);
    }
    return v;
}

MockProvider::MockProvider(std::uint64_t seed, std::size_t dim) : m_seed(seed), m_dim(dim)
{
    if (dim == 0) {
        throw ContractError("mock provider dimension must be positive");
    }
}

std::vector<EmbeddingVector> MockProvider::embed_texts(const std::vector<std::string>& texts)
{
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(mock_embedding(m_seed, text, m_dim));
    }
    return out;
}

std::vector<EmbeddingVector> MockProvider::embed_clips(const std::vector<std::string>& clip_ids)
{
    return embed_texts(clip_ids);
}

StoreProvider::StoreProvider(std::shared_ptr<const EmbeddingStore> clips, std::shared_ptr<const EmbeddingStore> texts)
    : m_clips(std::move(clips)), m_texts(std::move(texts)), m_dim(0)
{
    if (!m_clips && !m_texts) {
        throw ContractError("store provider needs at least one store");
    }
    if (m_clips && m_texts && m_clips->dim() != m_texts->dim()) {
        throw ContractError("clip store dim " + std::to_string(m_clips->dim()) + " differs from text store dim " +
                            std::to_string(m_texts->dim()));
    }
    m_dim = m_clips ? m_clips->dim() : m_texts->dim();
}

namespace {

std::vector<EmbeddingVector> lookup_all(const EmbeddingStore* store, const std::vector<std::string>& keys,
                                        const char* what)
{
    if (store == nullptr) {
        throw ContractError(std::string("no ") + what + " store configured");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(keys.size());
    for (const auto& key : keys) {
        out.push_back(store->lookup(key));
    }
    return out;
}

}  // namespace

std::vector<EmbeddingVector> StoreProvider::embed_texts(const std::vector<std::string>& texts)
{
    return lookup_all(m_texts.get(), texts, "text");
}

std::vector<EmbeddingVector> StoreProvider::embed_clips(const std::vector<std::string>& clip_ids)
{
    return lookup_all(m_clips.get(), clip_ids, "clip");
}

HttpProvider::HttpProvider(const std::string& url, std::size_t dim, HttpProviderOptions options)
    : m_transport(url, options.policy), m_dim(dim), m_options(std::move(options))
{
    if (dim == 0) {
        throw ContractError("http provider dimension must be positive");
    }
    if (m_options.batch_size == 0 || m_options.max_in_flight == 0) {
        throw ContractError("batch size and in-flight bound must be positive");
    }
}

std::vector<EmbeddingVector> HttpProvider::embed_texts(const std::vector<std::string>& texts)
{
    return embed("texts", texts);
}

std::vector<EmbeddingVector> HttpProvider::embed_clips(const std::vector<std::string>& clip_ids)
{
    return embed("clip_ids", clip_ids);
}

std::vector<EmbeddingVector> HttpProvider::embed(const char* field, const std::vector<std::string>& inputs)
{
    std::vector<EmbeddingVector> out;
    out.reserve(inputs.size());
    const auto batch = m_options.batch_size;
    std::size_t next = 0;
    while (next < inputs.size()) {
        std::vector<std::future<std::vector<EmbeddingVector>>> wave;
        for (std::size_t i = 0; i < m_options.max_in_flight && next < inputs.size(); ++i) {
            const auto first = next;
            const auto last = std::min(inputs.size(), first + batch);
            next = last;
            wave.push_back(std::async(std::launch::async,
                                      [this, field, &inputs, first, last] { return embed_batch(field, inputs, first, last); }));
        }
        for (auto& f : wave) {
            for (auto& v : f.get()) {
                out.push_back(std::move(v));
            }
        }
    }
    return out;
}

std::vector<EmbeddingVector> HttpProvider::embed_batch(const char* field, const std::vector<std::string>& inputs,
                                                       std::size_t first, std::size_t last) const
{
    json request = {{field, std::vector<std::string>(inputs.begin() + static_cast<std::ptrdiff_t>(first),
                                                     inputs.begin() + static_cast<std::ptrdiff_t>(last))}};
    const auto body = m_transport.post_json(request.dump());

    json response;
    try {
        response = json::parse(body);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed embedding response: ") + e.what());
    }
    if (!response.is_object() || !response.contains("vectors") || !response["vectors"].is_array()) {
        throw FormatError("malformed embedding response: missing 'vectors' array");
    }
    const auto& vectors = response["vectors"];
    const auto expected = last - first;
    if (vectors.size() != expected) {
        throw FormatError("cardinality mismatch: sent " + std::to_string(expected) + " inputs, received " +
                          std::to_string(vectors.size()) + " vectors");
    }

    std::vector<EmbeddingVector> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto& values = vectors[i];
        if (!values.is_array() || values.size() != m_dim) {
            throw FormatError("dimension mismatch: vector " + std::to_string(first + i) + " has " +
                              std::to_string(values.is_array() ? values.size() : 0) + " components, expected " +
                              std::to_string(m_dim));
        }
        EmbeddingVector v(static_cast<Eigen::Index>(m_dim));
        for (std::size_t c = 0; c < m_dim; ++c) {
            if (!values[c].is_number()) {
                throw FormatError("malformed embedding response: non-numeric component");
            }
            v(static_cast<Eigen::Index>(c)) = values[c].get<float>();
        }
        try {
            validate_embedding(v);
        } catch (const ContractError& e) {
            throw FormatError("vector " + std::to_string(first + i) + ": " + e.what());
        }
        out.push_back(std::move(v));
    }
    return out;
}

HttpReranker::HttpReranker(const std::string& url, HttpPolicy policy) : m_transport(url, std::move(policy)) {}

std::vector<std::string> HttpReranker::rerank(std::string_view query_text,
                                              const std::vector<RerankCandidate>& candidates)
{
    json items = json::array();
    for (const auto& c : candidates) {
        items.push_back({{"id", c.id}, {"text", c.text}});
    }
    json request = {{"query", std::string(query_text)}, {"candidates", std::move(items)}};
    const auto body = m_transport.post_json(request.dump());

    json response;
    try {
        response = json::parse(body);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed rerank response: ") + e.what());
    }
    if (!response.is_object() || !response.contains("ranking") || !response["ranking"].is_array()) {
        throw FormatError("malformed rerank response: missing 'ranking' array");
    }
    std::vector<std::string> ranking;
    for (const auto& id : response["ranking"]) {
        if (!id.is_string()) {
            throw FormatError("malformed rerank response: ranking entries must be strings");
        }
        ranking.push_back(id.get<std::string>());
    }
    return ranking;
}

}  // namespace lvmr
