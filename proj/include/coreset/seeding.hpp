#pragma once

#include "coreset/core_model.hpp"
#include "coreset/random.hpp"

#include <cstdint>
#include <vector>

namespace coreset {

struct Seeding {
    Query centers;
    std::vector<std::size_t> indices;  // rows of the input the centers were taken from
    bool padded = false;               // fewer than k distinct positive-mass points existed
};

/// k-means++ style D^2 sampling on a weighted dataset. The first center is
/// drawn proportionally to weight, each following one proportionally to
/// weight * (squared distance to the centers chosen so far).
Seeding d2_sample(const WeightedDataset& data, std::size_t k, Rng& rng);

struct BicriteriaOptions {
    double run_factor = 3.0;  // runs = max(1, ceil(run_factor * ln(1/delta)))
};

/// Best of several independent D^2 seedings, used as an (alpha, 1)
/// bicriteria approximation.
struct Bicriteria {
    Query centers;
    std::vector<std::size_t> indices;
    double alpha = 0.0;
    double beta = 1.0;
    double seed_cost = 0.0;
    std::size_t runs_taken = 0;
    std::size_t best_run = 0;
    std::vector<double> run_costs;
    bool padded = false;
};

/// 16 * (log2 k + 2)
double d2_alpha(std::size_t k);

std::size_t bicriteria_runs(double delta, double run_factor);

/// Run r uses derive_seed(seed, r). Runs may execute concurrently; the
/// lowest cost wins, ties going to the lowest run index.
Bicriteria bicriteria(const WeightedDataset& data, std::size_t k, double delta, std::uint64_t seed,
                      const BicriteriaOptions& options = {});

}  // namespace coreset
