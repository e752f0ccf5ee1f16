#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coreset {

/// Points in R^d with a non-negative weight per point. Row-major storage.
///
/// Immutable once constructed: every operation that "changes" a dataset
/// returns a new one. At least one weight must be strictly positive.
class WeightedDataset {
public:
    WeightedDataset(std::vector<double> points, std::vector<double> weights, std::size_t dim);

    /// Every point gets weight 1/n.
    static WeightedDataset uniform(std::vector<double> points, std::size_t dim);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {points_.data() + i * dim_, dim_};
    }
    double weight(std::size_t i) const noexcept { return weights_[i]; }

    std::span<const double> points() const noexcept { return points_; }
    std::span<const double> weights() const noexcept { return weights_; }

    double total_weight() const noexcept { return total_weight_; }

    /// True when all weights agree to within `rel_tol` of the largest one.
    bool has_uniform_weights(double rel_tol = 1e-12) const noexcept;

    WeightedDataset subset(std::span<const std::size_t> indices) const;
    WeightedDataset with_weights(std::vector<double> weights) const;

    /// Disjoint union; weights are carried over unchanged.
    static WeightedDataset concat(const WeightedDataset& a, const WeightedDataset& b);

    friend bool operator==(const WeightedDataset&, const WeightedDataset&) = default;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
    std::size_t dim_ = 0;
    double total_weight_ = 0.0;
};

/// A candidate solution: k centers in R^d.
class Query {
public:
    Query(std::vector<double> centers, std::size_t dim);

    std::size_t k() const noexcept { return centers_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> center(std::size_t j) const noexcept {
        return {centers_.data() + j * dim_, dim_};
    }
    std::span<const double> centers() const noexcept { return centers_; }

    friend bool operator==(const Query&, const Query&) = default;

private:
    std::vector<double> centers_;
    std::size_t dim_ = 0;
};

/// Squared Euclidean distance, or the squared Mahalanobis distance
/// (x-q)^T A (x-q) for a symmetric positive-definite A.
class CostModel {
public:
    enum class Kind { SquaredEuclidean, Mahalanobis };

    static CostModel squared_euclidean() { return CostModel{}; }

    /// `matrix` is row-major d x d. Throws std::invalid_argument if it is not
    /// symmetric positive definite.
    static CostModel mahalanobis(std::vector<double> matrix, std::size_t dim);

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }

    double distance(std::span<const double> x, std::span<const double> q) const;

    /// Upper-triangular R (row-major) with A = R^T R, so that
    /// d_A(x, q) = ||R x - R q||^2.
    std::span<const double> whitening_factor() const noexcept { return factor_; }

private:
    Kind kind_ = Kind::SquaredEuclidean;
    std::size_t dim_ = 0;
    std::vector<double> matrix_;
    std::vector<double> factor_;
};

enum class Summation { Sequential, Compensated };

struct PointCost {
    double cost;
    std::size_t nearest;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Cost of one point against its nearest center; ties go to the lowest index.
PointCost point_cost(std::span<const double> x, const Query& query,
                     const CostModel& model = CostModel::squared_euclidean());

/// Sum over points of weight * nearest-center cost, accumulated in point
/// index order. The result does not depend on the thread count.
double total_cost(const WeightedDataset& data, const Query& query,
                  const CostModel& model = CostModel::squared_euclidean(),
                  Summation summation = Summation::Sequential);

struct Assignment {
    std::vector<std::size_t> nearest;
    std::vector<double> cost;   // unweighted nearest-center cost per point
};

Assignment assign(const WeightedDataset& data, const Query& query,
                  const CostModel& model = CostModel::squared_euclidean());

/// Maps x -> R x with A = R^T R; squared Euclidean distances in the image equal
/// Mahalanobis distances in the original space.
WeightedDataset whiten(const WeightedDataset& data, const CostModel& mahalanobis);
Query whiten(const Query& query, const CostModel& mahalanobis);

/// Number of distinct positive-weight points.
std::size_t count_distinct_points(const WeightedDataset& data);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values) noexcept;

void check_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace coreset
