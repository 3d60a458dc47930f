#include "lvmr/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "lvmr/error.hpp"
#include "lvmr/file_io.hpp"

namespace lvmr {
namespace {

constexpr std::string_view kMagic = "LVRE";

template <typename T>
void put_le(std::string& out, T value)
{
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out += static_cast<char>((value >> (8 * i)) & 0xFF);
    }
}

class Reader {
  public:
    explicit Reader(std::string_view bytes) : m_bytes(bytes) {}

    bool has(std::size_t n) const { return m_bytes.size() - m_pos >= n; }
    bool at_end() const { return m_pos == m_bytes.size(); }

    template <typename T>
    T get_le()
    {
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value |= static_cast<T>(static_cast<unsigned char>(m_bytes[m_pos + i])) << (8 * i);
        }
        m_pos += sizeof(T);
        return value;
    }

    std::string_view take(std::size_t n)
    {
        auto out = m_bytes.substr(m_pos, n);
        m_pos += n;
        return out;
    }

  private:
    std::string_view m_bytes;
    std::size_t m_pos = 0;
};

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : m_dim(dim)
{
    if (dim == 0 || dim > std::numeric_limits<std::uint32_t>::max()) {
        throw ContractError("store dimension must be in [1, 2^32)");
    }
}

void EmbeddingStore::add(std::string id, EmbeddingVector vector)
{
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw ContractError("id longer than 65535 bytes");
    }
    if (static_cast<std::size_t>(vector.size()) != m_dim) {
        throw ContractError("vector for " + id + " has dimension " + std::to_string(vector.size()) +
                            ", store expects " + std::to_string(m_dim));
    }
    validate_embedding(vector);
    if (m_vectors.count(id) != 0) {
        throw ContractError("duplicate id " + id);
    }
    m_ids.push_back(id);
    m_vectors.emplace(std::move(id), std::move(vector));
}

bool EmbeddingStore::contains(std::string_view id) const
{
    return m_vectors.count(std::string(id)) != 0;
}

const EmbeddingVector& EmbeddingStore::lookup(std::string_view id) const
{
    auto it = m_vectors.find(std::string(id));
    if (it == m_vectors.end()) {
        throw ContractError("unknown id " + std::string(id));
    }
    return it->second;
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b)
{
    if (a.m_dim != b.m_dim || a.m_ids != b.m_ids) {
        return false;
    }
    for (const auto& id : a.m_ids) {
        if (a.m_vectors.at(id) != b.m_vectors.at(id)) {
            return false;
        }
    }
    return true;
}

std::string encode_store(const EmbeddingStore& store)
{
    std::string out;
    out.reserve(18 + store.size() * (2 + 16 + 4 * store.dim()));
    out += kMagic;
    put_le<std::uint16_t>(out, EmbeddingStore::kFormatVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim()));
    put_le<std::uint64_t>(out, store.size());
    for (const auto& id : store.ids()) {
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out += id;
        const auto& v = store.lookup(id);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v(i)));
        }
    }
    return out;
}

EmbeddingStore decode_store(std::string_view bytes)
{
    Reader in(bytes);
    if (!in.has(4) || in.take(4) != kMagic) {
        throw FormatError("bad magic: not an embedding store");
    }
    if (!in.has(2 + 4 + 8)) {
        throw FormatError("truncated file: incomplete header");
    }
    const auto version = in.get_le<std::uint16_t>();
    if (version != EmbeddingStore::kFormatVersion) {
        throw FormatError("unsupported store version " + std::to_string(version));
    }
    const auto dim = in.get_le<std::uint32_t>();
    const auto count = in.get_le<std::uint64_t>();
    if (dim == 0) {
        throw FormatError("store header declares dim 0");
    }

    EmbeddingStore store(dim);
    for (std::uint64_t r = 0; r < count; ++r) {
        const auto where = "record " + std::to_string(r);
        if (!in.has(2)) {
            throw FormatError("truncated file: " + where + " missing");
        }
        const auto id_length = in.get_le<std::uint16_t>();
        if (!in.has(id_length)) {
            throw FormatError("truncated file: " + where + " id cut short");
        }
        std::string id(in.take(id_length));
        if (!in.has(std::size_t{4} * dim)) {
            throw FormatError("payload length mismatch: " + where + " ('" + id + "') expects " +
                              std::to_string(dim) + " components");
        }
        EmbeddingVector v(dim);
        for (std::uint32_t i = 0; i < dim; ++i) {
            v(i) = std::bit_cast<float>(in.get_le<std::uint32_t>());
        }
        if (store.contains(id)) {
            throw FormatError("duplicate id " + id);
        }
        try {
            store.add(std::move(id), std::move(v));
        } catch (const ContractError& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    if (!in.at_end()) {
        throw FormatError("payload length mismatch: trailing bytes after " + std::to_string(count) + " records");
    }
    return store;
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& path)
{
    write_file_atomic(path, encode_store(store));
}

EmbeddingStore load_store(const std::filesystem::path& path)
{
    try {
        return decode_store(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace lvmr
