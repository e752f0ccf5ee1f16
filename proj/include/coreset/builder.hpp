#pragma once

#include "coreset/core_model.hpp"
#include "coreset/random.hpp"
#include "coreset/seeding.hpp"
#include "coreset/sensitivity.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace coreset {

enum class SamplingDistribution { Sensitivity, Uniform };

std::string_view to_string(SamplingDistribution d) noexcept;

struct Provenance {
    std::size_t m = 0;                       // number of draws
    std::uint64_t seed = 0;
    std::optional<double> epsilon_target;
    std::size_t source_n = 0;
    SamplingDistribution distribution = SamplingDistribution::Sensitivity;
    bool merged_duplicates = true;
};

/// Weighted sample of a dataset. `source_index[i]` is the row of the source
/// the i-th coreset point was drawn from.
struct Coreset {
    WeightedDataset data;
    std::vector<std::size_t> source_index;
    Provenance provenance;
};

/// m independent draws with replacement from q; each draw of x carries
/// weight mu(x) / (m q(x)). With `merge_duplicates` repeated draws collapse
/// into one row (in source index order) whose weight is the sum.
Coreset importance_sample(const WeightedDataset& data, std::span<const double> q, std::size_t m,
                          Rng& rng, bool merge_duplicates = true);

/// Union of coresets of disjoint parts; `offsets[i]` is added to the source
/// indices of part i. Property: a union of eps-coresets is an eps-coreset of
/// the union of the parts.
Coreset merge_coresets(std::span<const Coreset> parts, std::span<const std::size_t> offsets);

struct SampleSizeSpec {
    std::size_t d = 1;
    std::size_t k = 1;
    double epsilon = 0.1;
    double delta = 0.1;
    double c_size = 1.0;
    std::optional<std::size_t> pdim_override;
};

/// ceil(c * (d k^3 log2(max(k,2)) + k^2 ln(1/delta)) / eps^2), or with a
/// pseudo-dimension override d', ceil(c * S^2 (d' + ln(1/delta)) / eps^2)
/// with S = 6 alpha + 4k.
std::size_t recommended_m(const SampleSizeSpec& spec);

struct BuildOptions {
    double c_size = 1.0;
    BicriteriaOptions bicriteria;
    SensitivityOptions sensitivity;
    bool merge_duplicates = true;
};

struct BuildResult {
    Coreset coreset;
    Bicriteria bicriteria;
    SensitivityProfile sensitivity;
    std::vector<double> q;
};

/// Seeding with delta/2, sensitivity bound, q = s / sum(s) (or
/// mu s / sum(mu s) for weighted input), then importance sampling with m
/// draws (recommended_m at delta/2 when m is not given).
BuildResult build_kmeans_coreset_detailed(const WeightedDataset& data, std::size_t k, double epsilon,
                                          double delta, std::optional<std::size_t> m, std::uint64_t seed,
                                          const BuildOptions& options = {});

inline Coreset build_kmeans_coreset(const WeightedDataset& data, std::size_t k, double epsilon,
                                    double delta, std::optional<std::size_t> m, std::uint64_t seed,
                                    const BuildOptions& options = {}) {
    return build_kmeans_coreset_detailed(data, k, epsilon, delta, m, seed, options).coreset;
}

/// Sampling proportional to weight (uniform over points for uniform data).
Coreset uniform_baseline(const WeightedDataset& data, std::size_t m, std::uint64_t seed,
                         bool merge_duplicates = true);

}  // namespace coreset
