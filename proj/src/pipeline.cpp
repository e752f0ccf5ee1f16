#include "coreset/pipeline.hpp"

#include "coreset/io.hpp"
#include "coreset/parallel.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace coreset {

MergeReduceTree::MergeReduceTree(std::size_t dim, StreamOptions options, std::uint64_t seed)
    : dim_(dim), options_(std::move(options)), seed_(seed) {
    if (dim_ == 0) {
        throw std::invalid_argument("stream dimension must be at least 1");
    }
    if (options_.leaf_block_size == 0) {
        throw std::invalid_argument("leaf block size must be at least 1");
    }
    if (options_.k == 0) {
        throw std::invalid_argument("stream needs k >= 1");
    }
    // Merged coresets carry non-uniform weights.
    options_.build.sensitivity.generalized_weights = true;
}

std::uint64_t MergeReduceTree::leaf_seed(std::size_t block) const noexcept {
    return block == 0 ? seed_ : derive_seed(seed_, stream::leaf + block);
}

StreamLevel MergeReduceTree::build_leaf(std::size_t block, std::size_t offset, std::vector<double> points,
                                        std::vector<double> weights) const {
    const WeightedDataset data(std::move(points), std::move(weights), dim_);
    Coreset c = build_kmeans_coreset(data, options_.k, options_.level_epsilon, options_.delta, options_.m,
                                     leaf_seed(block), options_.build);
    for (std::size_t& i : c.source_index) {
        i += offset;
    }
    return StreamLevel{std::move(c), 0};
}

Coreset MergeReduceTree::compress(const Coreset& merged, double epsilon, std::uint64_t seed) const {
    Coreset c = build_kmeans_coreset(merged.data, options_.k, epsilon, options_.delta, options_.m, seed,
                                     options_.build);
    for (std::size_t& i : c.source_index) {
        i = merged.source_index[i];
    }
    c.provenance.source_n = merged.provenance.source_n;
    return c;
}

void MergeReduceTree::insert(std::span<const double> point, double weight) {
    check_same_dim(point.size(), dim_, "stream insert");
    buffer_points_.insert(buffer_points_.end(), point.begin(), point.end());
    buffer_weights_.push_back(weight);
    ++points_seen_;
    if (buffer_weights_.size() < options_.leaf_block_size) {
        return;
    }

    const std::size_t offset = points_seen_ - buffer_weights_.size();
    StreamLevel carry = build_leaf(blocks_built_, offset, std::move(buffer_points_), std::move(buffer_weights_));
    buffer_points_.clear();
    buffer_weights_.clear();
    ++blocks_built_;

    std::size_t l = 0;
    while (l < levels_.size() && levels_[l]) {
        const Coreset parts[] = {std::move(levels_[l]->coreset), std::move(carry.coreset)};
        const std::size_t offsets[] = {0, 0};
        const std::size_t depth = std::max(levels_[l]->depth, carry.depth) + 1;
        levels_[l].reset();
        const Coreset merged = merge_coresets(parts, offsets);
        carry = StreamLevel{compress(merged, options_.level_epsilon,
                                     derive_seed(seed_, stream::compress + compressions_)),
                            depth};
        ++compressions_;
        ++l;
    }
    if (l == levels_.size()) {
        levels_.emplace_back();
    }
    levels_[l] = std::move(carry);
}

std::vector<std::size_t> MergeReduceTree::occupied_levels() const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        if (levels_[l]) {
            out.push_back(l);
        }
    }
    return out;
}

const StreamLevel* MergeReduceTree::level(std::size_t l) const noexcept {
    return l < levels_.size() && levels_[l] ? &*levels_[l] : nullptr;
}

StreamResult MergeReduceTree::finalize(std::optional<double> final_epsilon) const {
    if (points_seen_ == 0) {
        throw std::invalid_argument("cannot finalize an empty stream");
    }
    std::vector<Coreset> parts;
    std::size_t depth = 0;
    if (!buffer_weights_.empty()) {
        StreamLevel leaf = build_leaf(blocks_built_, points_seen_ - buffer_weights_.size(), buffer_points_,
                                      buffer_weights_);
        parts.push_back(std::move(leaf.coreset));
    }
    for (const auto& lvl : levels_) {
        if (lvl) {
            parts.push_back(lvl->coreset);
            depth = std::max(depth, lvl->depth);
        }
    }

    StreamResult result{parts.size() == 1
                            ? std::move(parts.front())
                            : merge_coresets(parts, std::vector<std::size_t>(parts.size(), 0)),
                        depth, 0.0};
    double budget = std::pow(1.0 + options_.level_epsilon, static_cast<double>(depth));
    if (final_epsilon) {
        result.coreset =
            compress(result.coreset, *final_epsilon, derive_seed(seed_, stream::compress + compressions_));
        budget *= 1.0 + *final_epsilon;
    }
    result.error_budget = budget - 1.0;
    return result;
}

std::vector<std::vector<std::size_t>> partition_indices(std::size_t n, const DistributedPlan& plan) {
    if (plan.workers == 0) {
        throw std::invalid_argument("at least one worker is required");
    }
    std::vector<std::vector<std::size_t>> parts(plan.workers);
    if (plan.rule == PartitionRule::RoundRobin) {
        for (std::size_t i = 0; i < n; ++i) {
            parts[i % plan.workers].push_back(i);
        }
    } else {
        for (std::size_t w = 0; w < plan.workers; ++w) {
            const std::size_t begin = w * n / plan.workers;
            const std::size_t end = (w + 1) * n / plan.workers;
            for (std::size_t i = begin; i < end; ++i) {
                parts[w].push_back(i);
            }
        }
    }
    return parts;
}

std::vector<std::size_t> DistributedResult::bytes_per_worker() const {
    std::vector<std::size_t> out;
    for (const auto& w : workers) {
        out.push_back(w.bytes_sent);
    }
    return out;
}

DistributedResult distributed_build(const WeightedDataset& data, const DistributedPlan& plan, std::size_t k,
                                    double epsilon, double delta, std::optional<std::size_t> m,
                                    const BuildOptions& options) {
    auto parts = partition_indices(data.size(), plan);
    std::vector<WorkerReport> workers(plan.workers);

    parallel_tasks(plan.workers, [&](std::size_t w) {
        const auto start = std::chrono::steady_clock::now();
        WorkerReport& report = workers[w];
        report.indices = std::move(parts[w]);
        report.seed = derive_seed(plan.seed, stream::worker + w);
        if (report.indices.empty()) {
            report.bytes_sent = binary_size(0, data.dim());
        } else {
            const WeightedDataset local = data.subset(report.indices);
            Coreset c = build_kmeans_coreset(local, k, epsilon, delta, m, report.seed, options);
            for (std::size_t& i : c.source_index) {
                i = report.indices[i];
            }
            c.provenance.source_n = local.size();
            report.bytes_sent = encode_binary(c.data).size();
            report.coreset = std::move(c);
        }
        report.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });

    std::vector<Coreset> contributions;
    for (const auto& w : workers) {
        if (w.coreset) {
            contributions.push_back(*w.coreset);
        }
    }
    if (contributions.empty()) {
        throw std::runtime_error("no worker produced a coreset");
    }
    Coreset merged = merge_coresets(contributions, std::vector<std::size_t>(contributions.size(), 0));
    merged.provenance.seed = plan.seed;
    merged.provenance.source_n = data.size();
    return DistributedResult{std::move(merged), std::move(workers)};
}

}  // namespace coreset
