#include "coreset/core_model.hpp"

#include "coreset/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace coreset {

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string("dimension mismatch in ") + what + ": " +
                                    std::to_string(a) + " vs " + std::to_string(b));
    }
}

double compensated_sum(std::span<const double> values) noexcept {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

WeightedDataset::WeightedDataset(std::vector<double> points, std::vector<double> weights,
                                 std::size_t dim)
    : points_(std::move(points)), weights_(std::move(weights)), dim_(dim) {
    if (dim_ == 0) {
        throw std::invalid_argument("dataset dimension must be at least 1");
    }
    if (weights_.empty()) {
        throw std::invalid_argument("dataset must contain at least one point");
    }
    if (points_.size() != weights_.size() * dim_) {
        throw std::invalid_argument("point buffer size " + std::to_string(points_.size()) +
                                    " does not match n*d = " +
                                    std::to_string(weights_.size() * dim_));
    }
    for (double v : points_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite coordinate in dataset");
        }
    }
    bool any_positive = false;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("weights must be finite and non-negative");
        }
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) {
        throw std::invalid_argument("at least one weight must be positive");
    }
    total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

WeightedDataset WeightedDataset::uniform(std::vector<double> points, std::size_t dim) {
    if (dim == 0) {
        throw std::invalid_argument("dataset dimension must be at least 1");
    }
    const std::size_t n = points.size() / dim;
    return WeightedDataset(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                           dim);
}

bool WeightedDataset::has_uniform_weights(double rel_tol) const noexcept {
    const auto [lo, hi] = std::minmax_element(weights_.begin(), weights_.end());
    return *hi - *lo <= rel_tol * *hi;
}

WeightedDataset WeightedDataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> pts;
    std::vector<double> ws;
    pts.reserve(indices.size() * dim_);
    ws.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= size()) {
            throw std::out_of_range("subset index out of range");
        }
        const auto p = point(i);
        pts.insert(pts.end(), p.begin(), p.end());
        ws.push_back(weights_[i]);
    }
    return WeightedDataset(std::move(pts), std::move(ws), dim_);
}

WeightedDataset WeightedDataset::with_weights(std::vector<double> weights) const {
    return WeightedDataset(points_, std::move(weights), dim_);
}

WeightedDataset WeightedDataset::concat(const WeightedDataset& a, const WeightedDataset& b) {
    check_same_dim(a.dim(), b.dim(), "concat");
    std::vector<double> pts(a.points_);
    pts.insert(pts.end(), b.points_.begin(), b.points_.end());
    std::vector<double> ws(a.weights_);
    ws.insert(ws.end(), b.weights_.begin(), b.weights_.end());
    return WeightedDataset(std::move(pts), std::move(ws), a.dim_);
}

Query::Query(std::vector<double> centers, std::size_t dim) : centers_(std::move(centers)), dim_(dim) {
    if (dim_ == 0) {
        throw std::invalid_argument("query dimension must be at least 1");
    }
    if (centers_.empty() || centers_.size() % dim_ != 0) {
        throw std::invalid_argument("query needs k >= 1 centers of dimension " +
                                    std::to_string(dim_));
    }
    for (double v : centers_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite query coordinate");
        }
    }
}

CostModel CostModel::mahalanobis(std::vector<double> matrix, std::size_t dim) {
    if (dim == 0 || matrix.size() != dim * dim) {
        throw std::invalid_argument("Mahalanobis matrix must be d x d");
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        matrix.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const double scale = a.cwiseAbs().maxCoeff();
    if (!((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
        throw std::invalid_argument("Mahalanobis matrix is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("Mahalanobis matrix is not positive definite");
    }
    // A = L L^T, so R = L^T gives A = R^T R.
    const Eigen::MatrixXd r = llt.matrixU();
    CostModel model;
    model.kind_ = Kind::Mahalanobis;
    model.dim_ = dim;
    model.matrix_ = std::move(matrix);
    model.factor_.resize(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            model.factor_[i * dim + j] = r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return model;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

double CostModel::distance(std::span<const double> x, std::span<const double> q) const {
    if (kind_ == Kind::SquaredEuclidean) {
        return squared_distance(x, q);
    }
    check_same_dim(x.size(), dim_, "Mahalanobis distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            row += matrix_[i * dim_ + j] * (x[j] - q[j]);
        }
        acc += (x[i] - q[i]) * row;
    }
    return acc;
}

PointCost point_cost(std::span<const double> x, const Query& query, const CostModel& model) {
    check_same_dim(x.size(), query.dim(), "point_cost");
    PointCost best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t j = 0; j < query.k(); ++j) {
        const double c = model.distance(x, query.center(j));
        if (c < best.cost) {
            best = {c, j};
        }
    }
    return best;
}

Assignment assign(const WeightedDataset& data, const Query& query, const CostModel& model) {
    check_same_dim(data.dim(), query.dim(), "assign");
    Assignment out;
    out.nearest.resize(data.size());
    out.cost.resize(data.size());
    parallel_for(data.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const PointCost pc = point_cost(data.point(i), query, model);
            out.nearest[i] = pc.nearest;
            out.cost[i] = pc.cost;
        }
    });
    return out;
}

double total_cost(const WeightedDataset& data, const Query& query, const CostModel& model,
                  Summation summation) {
    const Assignment a = assign(data, query, model);
    std::vector<double> terms(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        terms[i] = data.weight(i) * a.cost[i];
    }
    if (summation == Summation::Compensated) {
        return compensated_sum(terms);
    }
    double sum = 0.0;
    for (double t : terms) {
        sum += t;
    }
    return sum;
}

namespace {

std::vector<double> apply_factor(std::span<const double> rows, std::size_t dim,
                                 std::span<const double> factor) {
    std::vector<double> out(rows.size());
    const std::size_t n = rows.size() / dim;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t i = 0; i < dim; ++i) {
            double acc = 0.0;
            for (std::size_t j = i; j < dim; ++j) {
                acc += factor[i * dim + j] * rows[p * dim + j];
            }
            out[p * dim + i] = acc;
        }
    }
    return out;
}

void require_mahalanobis(const CostModel& model, std::size_t dim) {
    if (model.kind() != CostModel::Kind::Mahalanobis) {
        throw std::invalid_argument("whiten requires a Mahalanobis cost model");
    }
    check_same_dim(dim, model.dim(), "whiten");
}

}  // namespace

WeightedDataset whiten(const WeightedDataset& data, const CostModel& mahalanobis) {
    require_mahalanobis(mahalanobis, data.dim());
    auto weights = std::vector<double>(data.weights().begin(), data.weights().end());
    return WeightedDataset(apply_factor(data.points(), data.dim(), mahalanobis.whitening_factor()),
                           std::move(weights), data.dim());
}

Query whiten(const Query& query, const CostModel& mahalanobis) {
    require_mahalanobis(mahalanobis, query.dim());
    return Query(apply_factor(query.centers(), query.dim(), mahalanobis.whitening_factor()),
                 query.dim());
}

std::size_t count_distinct_points(const WeightedDataset& data) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.weight(i) > 0.0) {
            idx.push_back(i);
        }
    }
    auto less = [&](std::size_t a, std::size_t b) {
        const auto pa = data.point(a);
        const auto pb = data.point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::sort(idx.begin(), idx.end(), less);
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i == 0 || less(idx[i - 1], idx[i])) {
            ++distinct;
        }
    }
    return distinct;
}

}  // namespace coreset
