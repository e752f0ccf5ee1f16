#pragma once

#include "coreset/builder.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace coreset {

struct StreamOptions {
    std::size_t k = 1;
    std::size_t leaf_block_size = 10'000;
    double level_epsilon = 0.1;
    double delta = 0.1;
    std::optional<std::size_t> m;  // draws per leaf/compress; recommended_m when unset
    BuildOptions build;
};

/// Coreset held at one tree level, with the number of compress steps on
/// its deepest root-to-leaf path.
struct StreamLevel {
    Coreset coreset;
    std::size_t depth = 0;
};

struct StreamResult {
    Coreset coreset;
    std::size_t max_depth = 0;
    /// (1 + level_eps)^max_depth * (1 + final_eps) - 1
    double error_budget = 0.0;
};

/// Merge-reduce streaming summary. Holds at most one coreset per level;
/// two coresets at level L are merged (union) and compressed (re-sampled at
/// level_epsilon) into level L + 1, like a binary counter carry.
///
/// Seed lineage: leaf block 0 uses the tree seed itself, so a stream that
/// fits in one block reproduces build_kmeans_coreset with the same seed.
/// Leaf j > 0 uses derive_seed(seed, stream::leaf + j) and the c-th
/// compression derive_seed(seed, stream::compress + c).
class MergeReduceTree {
public:
    MergeReduceTree(std::size_t dim, StreamOptions options, std::uint64_t seed);

    void insert(std::span<const double> point, double weight = 1.0);

    /// Leaf coreset from the partial buffer, then a union of all occupied
    /// levels. With `final_epsilon`, one more compress step at that accuracy.
    StreamResult finalize(std::optional<double> final_epsilon = std::nullopt) const;

    std::size_t points_seen() const noexcept { return points_seen_; }
    std::size_t blocks_built() const noexcept { return blocks_built_; }
    std::size_t compressions() const noexcept { return compressions_; }
    std::size_t buffered() const noexcept { return buffer_weights_.size(); }
    std::vector<std::size_t> occupied_levels() const;
    const StreamLevel* level(std::size_t l) const noexcept;
    const StreamOptions& options() const noexcept { return options_; }

    std::uint64_t leaf_seed(std::size_t block) const noexcept;

private:
    StreamLevel build_leaf(std::size_t block, std::size_t offset, std::vector<double> points,
                           std::vector<double> weights) const;
    Coreset compress(const Coreset& merged, double epsilon, std::uint64_t seed) const;

    std::size_t dim_;
    StreamOptions options_;
    std::uint64_t seed_;
    std::vector<std::optional<StreamLevel>> levels_;
    std::vector<double> buffer_points_;
    std::vector<double> buffer_weights_;
    std::size_t points_seen_ = 0;
    std::size_t blocks_built_ = 0;
    std::size_t compressions_ = 0;
};

enum class PartitionRule { RoundRobin, Contiguous };

struct DistributedPlan {
    std::size_t workers = 1;
    PartitionRule rule = PartitionRule::RoundRobin;
    std::uint64_t seed = 0;
};

/// Disjoint cover of [0, n) with one (possibly empty) index list per worker.
std::vector<std::vector<std::size_t>> partition_indices(std::size_t n, const DistributedPlan& plan);

struct WorkerReport {
    std::vector<std::size_t> indices;
    std::optional<Coreset> coreset;  // empty partition: no contribution
    std::uint64_t seed = 0;
    std::size_t bytes_sent = 0;      // CSK1 serialized size of the contribution
    double wall_ms = 0.0;
};

struct DistributedResult {
    Coreset coreset;
    std::vector<WorkerReport> workers;

    std::vector<std::size_t> bytes_per_worker() const;
};

/// Each worker builds a coreset of its partition with
/// derive_seed(plan.seed, stream::worker + w); the coordinator takes the union
/// in worker order. Workers run concurrently.
DistributedResult distributed_build(const WeightedDataset& data, const DistributedPlan& plan,
                                    std::size_t k, double epsilon, double delta,
                                    std::optional<std::size_t> m = std::nullopt,
                                    const BuildOptions& options = {});

}  // namespace coreset
