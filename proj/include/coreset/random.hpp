#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace coreset {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child stream seed: splitmix64(parent ^ splitmix64(stream)). Every
/// component that fans out (restarts, workers, tree nodes) derives its
/// children this way so results do not depend on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
    return splitmix64(parent ^ splitmix64(stream));
}

// Stream tags used by the pipeline stages.
namespace stream {
inline constexpr std::uint64_t bicriteria = 0xB1C0;
inline constexpr std::uint64_t sampling = 0x5A3F;
inline constexpr std::uint64_t suite = 0x5E7E;
inline constexpr std::uint64_t solve = 0x501E;
inline constexpr std::uint64_t compress = 0xC0AE;
inline constexpr std::uint64_t leaf = 0x1EAF;
inline constexpr std::uint64_t worker = 0x3027;
}  // namespace stream

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Inverse-CDF draws from non-negative masses via an explicit cumulative sum.
/// Zero-mass indices are never returned.
class DiscreteSampler {
public:
    explicit DiscreteSampler(std::span<const double> mass);

    double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    std::size_t operator()(Rng& rng) const;

private:
    std::vector<double> cumulative_;
    std::size_t last_positive_ = 0;
};

}  // namespace coreset
