#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cirdil/errors.hpp"
#include "cirdil/injection.hpp"
#include "cirdil/rng.hpp"
#include "cirdil/tokenize.hpp"

namespace cirdil {

struct EmbedderConfig {
    std::size_t dim = 256;
    std::uint64_t hash_seed = 0x5eed'c1d0'0000'0001ULL;

    bool operator==(const EmbedderConfig&) const = default;
};

inline void validate(const EmbedderConfig& c) {
    if (c.dim < 8) throw ConfigError("dim", "must be >= 8");
    if (c.dim > (1u << 24)) throw ConfigError("dim", "must be <= 16777216");
}

// Non-zero components per token vector.
inline constexpr std::size_t kTokenNonZeros = 4;

struct TokenFeatures {
    std::array<std::uint32_t, kTokenNonZeros> index{};
    std::array<std::int8_t, kTokenNonZeros> sign{};
};

/// Signed feature hashing, defined bit-exactly:
///   h_idx  = mix(fnv1a64(token) ^ hash_seed)
///   h_sign = mix(fnv1a64(token, basis=0x84222325cbf29ce4) ^ rotl(hash_seed, 32))
/// where mix is the SplitMix64 finalizer. Indices come from the stream
/// s_{j+1} = mix(s_j + 0x9e3779b97f4a7c15), s_0 = h_idx, taking s mod dim and
/// skipping repeats until kTokenNonZeros distinct indices are found. The sign of
/// the j-th chosen index is + if bit j of h_sign is 0, else -.
inline TokenFeatures token_features(std::string_view token, const EmbedderConfig& config) {
    const std::uint64_t rot = (config.hash_seed << 32) | (config.hash_seed >> 32);
    const std::uint64_t h_idx = splitmix64_mix(fnv1a64(token) ^ config.hash_seed);
    const std::uint64_t h_sign = splitmix64_mix(fnv1a64(token, 0x84222325cbf29ce4ULL) ^ rot);
    TokenFeatures f;
    std::uint64_t s = h_idx;
    std::size_t found = 0;
    while (found < kTokenNonZeros) {
        s = splitmix64_mix(s + 0x9e3779b97f4a7c15ULL);
        const auto idx = static_cast<std::uint32_t>(s % config.dim);
        if (std::find(f.index.begin(), f.index.begin() + static_cast<std::ptrdiff_t>(found), idx) !=
            f.index.begin() + static_cast<std::ptrdiff_t>(found))
            continue;
        f.index[found] = idx;
        f.sign[found] = ((h_sign >> found) & 1u) ? std::int8_t{-1} : std::int8_t{1};
        ++found;
    }
    return f;
}

// Dense, unnormalized token vector: kTokenNonZeros entries of ±1.
inline std::vector<double> token_vector(std::string_view token, const EmbedderConfig& config) {
    if (token.empty()) throw DomainError("token_vector: empty token");
    validate(config);
    std::vector<double> v(config.dim, 0.0);
    const TokenFeatures f = token_features(token, config);
    for (std::size_t j = 0; j < kTokenNonZeros; ++j) v[f.index[j]] = f.sign[j];
    return v;
}

/// Unit vector in R^d.
class EmbeddingVector {
public:
    EmbeddingVector() = default;

    // Normalizes raw; throws DomainError if raw is (numerically) zero.
    static EmbeddingVector normalized(std::vector<double> raw) {
        double sq = 0.0;
        for (double x : raw) sq += x * x;
        const double norm = std::sqrt(sq);
        if (!(norm > 1e-300)) throw DomainError("cannot normalize a zero vector");
        for (double& x : raw) x /= norm;
        return EmbeddingVector(std::move(raw));
    }

    // Takes components as given; caller guarantees unit norm.
    static EmbeddingVector from_unit(std::vector<double> components) {
        return EmbeddingVector(std::move(components));
    }

    std::size_t dim() const noexcept { return components_.size(); }
    std::span<const double> components() const noexcept { return components_; }
    double operator[](std::size_t i) const noexcept { return components_[i]; }

    double norm() const noexcept {
        double sq = 0.0;
        for (double x : components_) sq += x * x;
        return std::sqrt(sq);
    }

    EmbeddingVector operator-() const {
        std::vector<double> c = components_;
        for (double& x : c) x = -x;
        return EmbeddingVector(std::move(c));
    }

    bool operator==(const EmbeddingVector&) const = default;

private:
    explicit EmbeddingVector(std::vector<double> c) : components_(std::move(c)) {}
    std::vector<double> components_;
};

/// Unnormalized mean of the token vectors of a non-empty sequence.
inline std::vector<double> mean_vector(std::span<const Token> tokens, const EmbedderConfig& config) {
    if (tokens.empty()) throw DomainError("embed: empty token sequence");
    validate(config);
    std::vector<double> sum(config.dim, 0.0);
    for (const Token& t : tokens) {
        const TokenFeatures f = token_features(t, config);
        for (std::size_t j = 0; j < kTokenNonZeros; ++j) sum[f.index[j]] += f.sign[j];
    }
    const double n = static_cast<double>(tokens.size());
    for (double& x : sum) x /= n;
    return sum;
}

/// E(x): mean of token vectors, L2-normalized. Order of tokens does not matter.
inline EmbeddingVector embed(std::span<const Token> tokens, const EmbedderConfig& config) {
    return EmbeddingVector::normalized(mean_vector(tokens, config));
}

inline double similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) throw DomainError("similarity: dimension mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) dot += a[i] * b[i];
    return std::clamp(dot, -1.0, 1.0);
}

// Gram-Schmidt step: the normalized component of v orthogonal to unit vector u.
inline EmbeddingVector orthogonalize(const EmbeddingVector& v, const EmbeddingVector& u) {
    if (v.dim() != u.dim()) throw DomainError("orthogonalize: dimension mismatch");
    double proj = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) proj += v[i] * u[i];
    std::vector<double> r(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) r[i] = v[i] - proj * u[i];
    return EmbeddingVector::normalized(std::move(r));
}

// v_final ≈ (1 - lambda) v_local + lambda v_global
struct MixDecomposition {
    EmbeddingVector v_local;
    EmbeddingVector v_global;
    double lambda = 0.0;
};

/// Normalized convex combination. lambda 0 and 1 return the inputs unchanged.
inline EmbeddingVector mix(const MixDecomposition& dec) {
    if (!(dec.lambda >= 0.0 && dec.lambda <= 1.0)) throw DomainError("mix: lambda must lie in [0, 1]");
    if (dec.v_local.dim() != dec.v_global.dim()) throw DomainError("mix: dimension mismatch");
    if (dec.lambda == 0.0) return dec.v_local;
    if (dec.lambda == 1.0) return dec.v_global;
    std::vector<double> v(dec.v_local.dim());
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = (1.0 - dec.lambda) * dec.v_local[i] + dec.lambda * dec.v_global[i];
        sq += v[i] * v[i];
    }
    if (std::sqrt(sq) < 1e-12) throw DomainError("mix: degenerate combination (antipodal inputs)");
    return EmbeddingVector::normalized(std::move(v));
}

struct DilutionPoint {
    double lambda = 0.0;
    double similarity = 0.0;
    // Angle between q and the mixed vector, acos(similarity): theta_ideal at
    // lambda = 0, theta_real elsewhere.
    double angle = 0.0;
};

/// sim(q, mix(lambda)) on an evenly spaced lambda grid over [0, 1].
inline std::vector<DilutionPoint> dilution_curve(const EmbeddingVector& q, const EmbeddingVector& v_local,
                                                 const EmbeddingVector& v_global, std::size_t grid_points) {
    if (grid_points < 3) throw DomainError("dilution_curve: grid_points must be >= 3");
    std::vector<DilutionPoint> curve;
    curve.reserve(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double lambda =
            i + 1 == grid_points ? 1.0 : static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double s = similarity(q, mix({v_local, v_global, lambda}));
        curve.push_back({lambda, s, std::acos(s)});
    }
    return curve;
}

// Exact split of a mean-pooled enriched chunk into its context and chunk parts:
// mean(I ⊕ c) = (1 - lambda) * mean_local + lambda * mean_global, lambda = CIR.
struct PoolingDecomposition {
    std::vector<double> mean_local;   // mean over chunk tokens
    std::vector<double> mean_global;  // mean over context tokens
    double lambda = 0.0;

    // normalize((1 - lambda) * mean_local + lambda * mean_global)
    EmbeddingVector combine() const {
        std::vector<double> v(mean_local.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - lambda) * mean_local[i] + lambda * mean_global[i];
        return EmbeddingVector::normalized(std::move(v));
    }

    // The same vector expressed as a mix of unit directions: the direction
    // weights absorb the norms of the two means.
    MixDecomposition as_unit_mix() const {
        double nl = 0.0;
        double ng = 0.0;
        for (double x : mean_local) nl += x * x;
        for (double x : mean_global) ng += x * x;
        nl = std::sqrt(nl);
        ng = std::sqrt(ng);
        const double wl = (1.0 - lambda) * nl;
        const double wg = lambda * ng;
        return {EmbeddingVector::normalized(mean_local), EmbeddingVector::normalized(mean_global), wg / (wl + wg)};
    }
};

inline PoolingDecomposition decompose(const EnrichedChunk& e, const EmbedderConfig& config) {
    if (e.context.length() == 0) throw DomainError("decompose: empty context");
    PoolingDecomposition d;
    d.mean_local = mean_vector(e.base.tokens, config);
    d.mean_global = mean_vector(e.context.tokens(), config);
    d.lambda = e.cir;
    return d;
}

/// Weight of the context component inside mean(I ⊕ c), recovered by projecting
/// the pooled mean onto the segment between the chunk mean and the context mean.
/// Under mean pooling this equals the CIR.
inline double effective_lambda(const EnrichedChunk& e, const EmbedderConfig& config) {
    if (e.context.length() == 0) return 0.0;
    if (e.base.tokens.empty()) throw DomainError("effective_lambda: empty chunk");
    const auto pooled = mean_vector(e.tokens, config);
    const auto local = mean_vector(e.base.tokens, config);
    const auto global = mean_vector(e.context.tokens(), config);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        const double d = global[i] - local[i];
        num += (pooled[i] - local[i]) * d;
        den += d * d;
    }
    if (den < 1e-24) {
        // Identical means: every lambda reproduces the pooled vector; report the
        // token-share weight.
        return static_cast<double>(e.context.length()) / static_cast<double>(e.tokens.size());
    }
    return num / den;
}

}  // namespace cirdil
