#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lvmr/embedding.hpp"

namespace lvmr {

/// In-memory map from id to fixed-dimension float vector, keeping insertion order.
///
/// On disk (all integers little-endian):
///   "LVRE" | version u16 (=1) | dim u32 | count u64 |
///   count x [ id_length u16 | id UTF-8 bytes | dim x float32 ]
class EmbeddingStore {
  public:
    static constexpr std::uint16_t kFormatVersion = 1;

    explicit EmbeddingStore(std::size_t dim);

    std::size_t dim() const noexcept { return m_dim; }
    std::size_t size() const noexcept { return m_ids.size(); }
    const std::vector<std::string>& ids() const noexcept { return m_ids; }

    /// Throws ContractError on duplicate id, wrong length or non-finite component.
    void add(std::string id, EmbeddingVector vector);

    bool contains(std::string_view id) const;

    /// Throws ContractError("unknown id <id>").
    const EmbeddingVector& lookup(std::string_view id) const;

    friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

  private:
    std::size_t m_dim;
    std::vector<std::string> m_ids;
    std::unordered_map<std::string, EmbeddingVector> m_vectors;
};

std::string encode_store(const EmbeddingStore& store);

/// Throws FormatError on bad magic, unsupported version, truncation, payload
/// length mismatch, duplicate ids or non-finite values.
EmbeddingStore decode_store(std::string_view bytes);

/// Writes through a temporary file and renames it into place.
void save_store(const EmbeddingStore& store, const std::filesystem::path& path);

EmbeddingStore load_store(const std::filesystem::path& path);

}  // namespace lvmr
