#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cirdil/embedding.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/io.hpp"

namespace cirdil {

struct IndexEntry {
    std::string chunk_id;
    std::string doc_id;
    std::size_t section_index = 0;
    EmbeddingVector vector;
};

struct Hit {
    std::string chunk_id;
    std::string doc_id;
    std::size_t section_index = 0;
    double score = 0.0;

    bool operator==(const Hit&) const = default;
};

// Descending by score, ties by ascending chunk_id.
struct SearchResult {
    std::vector<Hit> hits;

    std::size_t size() const noexcept { return hits.size(); }
    const Hit& operator[](std::size_t i) const noexcept { return hits[i]; }

    bool operator==(const SearchResult&) const = default;
};

inline bool ranks_before(const Hit& a, const Hit& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk_id < b.chunk_id;
}

// Unit-norm tolerance for vectors stored as 32-bit floats.
inline constexpr double kUnitNormTolerance = 1e-5;

/// Exact cosine index. Vectors are held as 32-bit floats (the persisted
/// precision) and scored in double precision. Immutable once built; concurrent
/// searches need no synchronization.
class VectorIndex {
public:
    struct Meta {
        std::string chunk_id;
        std::string doc_id;
        std::uint32_t section_index = 0;

        bool operator==(const Meta&) const = default;
    };

    VectorIndex() = default;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return meta_.size(); }
    bool empty() const noexcept { return meta_.empty(); }
    const std::vector<Meta>& meta() const noexcept { return meta_; }
    std::span<const float> data() const noexcept { return data_; }

    std::span<const float> vector_at(std::size_t i) const noexcept {
        return std::span<const float>(data_).subspan(i * dim_, dim_);
    }

    bool operator==(const VectorIndex& o) const {
        if (dim_ != o.dim_ || meta_ != o.meta_ || data_.size() != o.data_.size()) return false;
        return std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(float)) == 0;
    }

    // Trusted construction from already-validated parts.
    static VectorIndex from_parts(std::size_t dim, std::vector<Meta> meta, std::vector<float> data) {
        VectorIndex idx;
        idx.dim_ = dim;
        idx.meta_ = std::move(meta);
        idx.data_ = std::move(data);
        idx.validate_or_throw<ValidationError>();
        return idx;
    }

    template <typename E>
    void validate_or_throw() const {
        if (data_.size() != meta_.size() * dim_) throw E("vector data size does not match count * dim");
        std::unordered_set<std::string_view> seen;
        for (std::size_t i = 0; i < meta_.size(); ++i) {
            if (!seen.insert(meta_[i].chunk_id).second) throw E("duplicate chunk_id '" + meta_[i].chunk_id + "'");
            double sq = 0.0;
            for (float x : vector_at(i)) sq += static_cast<double>(x) * static_cast<double>(x);
            if (!(std::abs(std::sqrt(sq) - 1.0) <= kUnitNormTolerance))
                throw E("vector of '" + meta_[i].chunk_id + "' is not unit-norm");
        }
    }

private:
    std::size_t dim_ = 0;
    std::vector<Meta> meta_;
    std::vector<float> data_;
};

/// Validates and packs entries. dim is taken from the entries; an empty entry
/// list yields an empty index of dimension `dim`.
inline VectorIndex build_index(const std::vector<IndexEntry>& entries, std::size_t dim = 0) {
    if (!entries.empty()) dim = entries.front().vector.dim();
    std::vector<VectorIndex::Meta> meta;
    std::vector<float> data;
    meta.reserve(entries.size());
    data.reserve(entries.size() * dim);
    for (const IndexEntry& e : entries) {
        if (e.vector.dim() != dim) throw ValidationError("dimension mismatch for '" + e.chunk_id + "'");
        if (e.section_index > UINT32_MAX) throw ValidationError("section index out of range");
        meta.push_back({e.chunk_id, e.doc_id, static_cast<std::uint32_t>(e.section_index)});
        for (double x : e.vector.components()) data.push_back(static_cast<float>(x));
    }
    return VectorIndex::from_parts(dim, std::move(meta), std::move(data));
}

inline double score(std::span<const float> stored, const EmbeddingVector& q) noexcept {
    double dot = 0.0;
    for (std::size_t i = 0; i < stored.size(); ++i) dot += static_cast<double>(stored[i]) * q[i];
    return dot;
}

/// Exact top-k by cosine score over a full scan.
inline SearchResult search(const VectorIndex& index, const EmbeddingVector& query, std::size_t k) {
    if (k == 0) throw DomainError("search: k must be >= 1");
    if (query.dim() != index.dim()) throw DomainError("search: query dimension does not match index");
    if (!(std::abs(query.norm() - 1.0) <= kUnitNormTolerance)) throw DomainError("search: query is not unit-norm");
    std::vector<Hit> all;
    all.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto& m = index.meta()[i];
        all.push_back({m.chunk_id, m.doc_id, m.section_index, score(index.vector_at(i), query)});
    }
    const std::size_t top = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(top), all.end(), ranks_before);
    all.resize(top);
    return {std::move(all)};
}

// Binary index file, little-endian:
//   "CIRX" | u16 version | u32 dim | u64 count
//   count x { u32 len, chunk_id bytes, u32 len, doc_id bytes, u32 section_index }
//   count x dim packed f32
inline constexpr std::string_view kIndexMagic = "CIRX";
inline constexpr std::uint16_t kIndexVersion = 1;

namespace detail {

template <typename U>
void put_le(std::string& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    template <typename U>
    U get_le(const char* what) {
        need(sizeof(U), what);
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }

    std::string get_string(const char* what) {
        const auto len = get_le<std::uint32_t>(what);
        need(len, what);
        std::string s(bytes_.substr(pos_, len));
        pos_ += len;
        return s;
    }

    std::string_view get_raw(std::size_t n, const char* what) {
        need(n, what);
        auto v = bytes_.substr(pos_, n);
        pos_ += n;
        return v;
    }

    bool at_end() const noexcept { return pos_ == bytes_.size(); }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated index file while reading ") + what);
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string index_to_bytes(const VectorIndex& index) {
    std::string out(kIndexMagic);
    detail::put_le<std::uint16_t>(out, kIndexVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.dim()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(index.size()));
    for (const auto& m : index.meta()) {
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.chunk_id.size()));
        out += m.chunk_id;
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.doc_id.size()));
        out += m.doc_id;
        detail::put_le<std::uint32_t>(out, m.section_index);
    }
    for (float x : index.data()) detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
    return out;
}

inline VectorIndex index_from_bytes(std::string_view bytes) {
    detail::ByteReader r(bytes);
    if (r.get_raw(4, "magic") != kIndexMagic) throw FormatError("bad magic: not a CIRX index file");
    const auto version = r.get_le<std::uint16_t>("version");
    if (version != kIndexVersion) throw FormatError("unsupported index version " + std::to_string(version));
    const auto dim = r.get_le<std::uint32_t>("dim");
    const auto count = r.get_le<std::uint64_t>("count");
    // Each entry needs at least 12 id-table bytes and dim floats.
    if (count > r.remaining() / (12 + 4ull * dim)) throw FormatError("count exceeds file size");
    std::vector<VectorIndex::Meta> meta;
    meta.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        VectorIndex::Meta m;
        m.chunk_id = r.get_string("chunk_id");
        m.doc_id = r.get_string("doc_id");
        m.section_index = r.get_le<std::uint32_t>("section_index");
        meta.push_back(std::move(m));
    }
    std::vector<float> data;
    data.reserve(count * dim);
    for (std::uint64_t i = 0; i < count * dim; ++i)
        data.push_back(std::bit_cast<float>(r.get_le<std::uint32_t>("vectors")));
    if (!r.at_end()) throw FormatError("trailing bytes after vector block");
    VectorIndex idx;
    try {
        idx = VectorIndex::from_parts(dim, std::move(meta), std::move(data));
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid index contents: ") + e.what());
    }
    return idx;
}

inline void save_index(const VectorIndex& index, const std::filesystem::path& path) {
    write_file_atomic(path, index_to_bytes(index));
}

inline VectorIndex load_index(const std::filesystem::path& path) { return index_from_bytes(read_file(path)); }

}  // namespace cirdil
