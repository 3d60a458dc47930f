#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lvmr/aural.hpp"
#include "lvmr/embedding.hpp"
#include "lvmr/embedding_store.hpp"
#include "lvmr/http_transport.hpp"

namespace lvmr {

/// Source of embeddings for one modality. Implementations must return vectors
/// of length dim() and be deterministic for identical inputs.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;

    virtual std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) = 0;
    virtual std::vector<EmbeddingVector> embed_clips(const std::vector<std::string>& clip_ids) = 0;
    virtual std::size_t dim() const = 0;
};

/// 64-bit FNV-1a over the bytes of `data`.
std::uint64_t fnv1a64(std::string_view data);

/// Deterministic unit vector for (seed, input): FNV-1a hash of the input mixed
/// with the seed seeds an xorshift64* stream, whose draws are mapped to [-1, 1)
/// and L2-normalized in double before narrowing to float.
EmbeddingVector mock_embedding(std::uint64_t seed, std::string_view input, std::size_t dim);

/// Hashes texts and clip ids alike; no model involved.
class MockProvider final : public EmbeddingProvider {
  public:
    MockProvider(std::uint64_t seed, std::size_t dim);

    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) override;
    std::vector<EmbeddingVector> embed_clips(const std::vector<std::string>& clip_ids) override;
    std::size_t dim() const override { return m_dim; }

  private:
    std::uint64_t m_seed;
    std::size_t m_dim;
};

/// Serves precomputed vectors: clip ids from `clips`, texts (keyed by their
/// exact string) from `texts`. Either store may be absent.
class StoreProvider final : public EmbeddingProvider {
  public:
    StoreProvider(std::shared_ptr<const EmbeddingStore> clips, std::shared_ptr<const EmbeddingStore> texts);

    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) override;
    std::vector<EmbeddingVector> embed_clips(const std::vector<std::string>& clip_ids) override;
    std::size_t dim() const override { return m_dim; }

  private:
    std::shared_ptr<const EmbeddingStore> m_clips;
    std::shared_ptr<const EmbeddingStore> m_texts;
    std::size_t m_dim;
};

struct HttpProviderOptions {
    HttpPolicy policy;
    std::size_t batch_size = 64;
    std::size_t max_in_flight = 4;
};

/// Client for an embedding server. Texts are posted as {"texts": [...]} and
/// clip ids as {"clip_ids": [...]}; the server answers {"vectors": [[...], ...]}
/// with one vector per input, each of length `dim`.
class HttpProvider final : public EmbeddingProvider {
  public:
    HttpProvider(const std::string& url, std::size_t dim, HttpProviderOptions options = {});

    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) override;
    std::vector<EmbeddingVector> embed_clips(const std::vector<std::string>& clip_ids) override;
    std::size_t dim() const override { return m_dim; }

  private:
    std::vector<EmbeddingVector> embed(const char* field, const std::vector<std::string>& inputs);
    std::vector<EmbeddingVector> embed_batch(const char* field, const std::vector<std::string>& inputs,
                                             std::size_t first, std::size_t last) const;

    HttpTransport m_transport;
    std::size_t m_dim;
    HttpProviderOptions m_options;
};

/// Reranker backed by a rerank server:
/// request  {"query": "...", "candidates": [{"id": "...", "text": "..."}]}
/// response {"ranking": ["id", ...]}
/// Transport failures surface as TransportError, bad responses as FormatError.
class HttpReranker final : public Reranker {
  public:
    HttpReranker(const std::string& url, HttpPolicy policy = {});

    std::vector<std::string> rerank(std::string_view query_text,
                                    const std::vector<RerankCandidate>& candidates) override;

  private:
    HttpTransport m_transport;
};

}  // namespace lvmr
