#pragma once

#include "coreset/core_model.hpp"
#include "coreset/seeding.hpp"

#include <span>
#include <vector>

namespace coreset {

/// Which coefficient set to use for the per-point bound.
///   Lemma:      2a d^2/c + 4a (sum_cluster d^2)/(|cluster| c) + 4n/|cluster|
///   Algorithm2: a d^2/c + 2a (sum_cluster d^2)/(|cluster| c) + 4n/|cluster|
enum class SensitivityConstants { Lemma, Algorithm2 };

struct SensitivityOptions {
    SensitivityConstants constants = SensitivityConstants::Lemma;
    /// Accept non-uniform weights by replacing cluster counts with cluster
    /// mass and n with total mass. Uniformly weighted inputs always take the
    /// count-based path.
    bool generalized_weights = false;
};

/// Sensitivities here are taken with respect to the normalized weights
/// mu(x) / sum(mu), which is the textbook setting when weights are 1/n.
struct SensitivityProfile {
    std::vector<double> s;                  // upper bounds on sensitivity, one per point
    std::vector<std::size_t> cluster_of;    // nearest bicriteria center
    std::vector<std::size_t> cluster_sizes;
    std::vector<double> cluster_mass;       // normalized weight mass per cluster
    std::vector<double> cluster_cost;       // sum of d(x, b_x)^2 (mass-weighted when generalized)
    double mean_seed_cost = 0.0;            // c-bar of the bicriteria centers
    double total = 0.0;                     // sum over x of (mu(x)/sum mu) s(x)
    double alpha = 0.0;
    double beta = 1.0;
    bool generalized = false;
    SensitivityConstants constants = SensitivityConstants::Lemma;

    std::size_t nonempty_clusters() const noexcept;

    /// Closed form of `total`: 6a + 4|B'| (Lemma) or 3a + 4|B'| (Algorithm2),
    /// with |B'| the number of nonempty clusters; 4|B'| when c-bar is zero.
    double expected_total() const noexcept;
};

SensitivityProfile sensitivity_bound(const WeightedDataset& data, const Query& centers, double alpha,
                                     const SensitivityOptions& options = {});

inline SensitivityProfile sensitivity_bound(const WeightedDataset& data, const Bicriteria& b,
                                            const SensitivityOptions& options = {}) {
    return sensitivity_bound(data, b.centers, b.alpha, options);
}

/// Exact k = 1 sensitivities: 1/W + ||x - mean||^2 / v, where W is the total
/// weight and v the weighted sum of squared deviations. Weighted total is 2.
std::vector<double> exact_sensitivity_1means(const WeightedDataset& data);

/// Lower bound on sensitivity: max over the given queries of
/// f_Q(x) / cost(X, Q). Queries with zero cost are skipped.
std::vector<double> grid_sensitivity_oracle(const WeightedDataset& data, std::size_t k,
                                            std::span<const Query> grid);

}  // namespace coreset
