#pragma once

#include "coreset/builder.hpp"
#include "coreset/core_model.hpp"

#include <cstdint>
#include <optional>

namespace coreset {

struct Solution {
    Query query;
    double objective = 0.0;  // total_cost on the set the solution was computed on
    std::size_t iterations = 0;
    bool converged = false;
};

struct LloydOptions {
    std::size_t max_iters = 300;
    double tol = 1e-9;  // relative objective decrease
};

/// Weighted Lloyd iterations from `init`. An empty cluster is re-seeded at
/// the point with the largest weighted cost (lowest index among ties).
Solution weighted_lloyd(const WeightedDataset& data, std::size_t k, const Query& init,
                        const LloydOptions& options = {});

/// Best of `restarts` Lloyd runs, restart r seeded by D^2 sampling with
/// derive_seed(seed, r). Ties go to the lowest restart index.
Solution lloyd_restarts(const WeightedDataset& data, std::size_t k, std::size_t restarts,
                        std::uint64_t seed, const LloydOptions& options = {});

struct PtasOptions {
    std::uint64_t partition_cap = 1'000'000;
};

/// Number of partitions of n items into at most k nonempty blocks
/// (sum of Stirling numbers of the second kind), saturating at UINT64_MAX.
std::uint64_t count_partitions(std::size_t n, std::size_t k);

/// Exhaustive search over all partitions of the distinct points into at most
/// k groups (restricted growth strings); each group's center is its weighted
/// centroid. Squared Euclidean only: whiten Mahalanobis data first.
Solution ptas_exhaustive(const WeightedDataset& data, std::size_t k, const PtasOptions& options = {});

enum class SolveMethod { Lloyd, Ptas };

struct CoresetSolveOptions {
    SolveMethod method = SolveMethod::Lloyd;
    std::size_t restarts = 10;
    std::size_t reference_restarts = 50;
    std::optional<std::size_t> m;
    BuildOptions build;
    LloydOptions lloyd;
    PtasOptions ptas;
};

struct CoresetSolveReport {
    Query coreset_query;
    Query reference_query;
    double objective_on_coreset = 0.0;
    double objective_on_full = 0.0;
    double reference_objective = 0.0;
    bool reference_exact = false;  // PTAS optimum rather than best-of-restarts heuristic
    double ratio = 0.0;            // objective_on_full / reference_objective
    std::size_t iterations = 0;
};

/// Solves on the given coreset and compares, on the full data, with a
/// reference solution. Both sides use derive_seed(seed, stream::solve).
CoresetSolveReport solve_with_coreset(const WeightedDataset& full, const WeightedDataset& coreset,
                                      std::size_t k, std::uint64_t seed,
                                      const CoresetSolveOptions& options = {});

struct CoresetSolveResult {
    Coreset coreset;
    CoresetSolveReport report;
};

CoresetSolveResult solve_via_coreset(const WeightedDataset& full, std::size_t k, double epsilon,
                                     double delta, std::uint64_t seed,
                                     const CoresetSolveOptions& options = {});

}  // namespace coreset
