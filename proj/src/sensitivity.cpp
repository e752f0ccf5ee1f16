#include "coreset/sensitivity.hpp"

#include "coreset/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace coreset {

std::size_t SensitivityProfile::nonempty_clusters() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cluster_sizes.begin(), cluster_sizes.end(), [](std::size_t c) { return c > 0; }));
}

double SensitivityProfile::expected_total() const noexcept {
    const double tail = 4.0 * static_cast<double>(nonempty_clusters());
    if (mean_seed_cost == 0.0) {
        return tail;
    }
    return (constants == SensitivityConstants::Lemma ? 6.0 : 3.0) * alpha + tail;
}

SensitivityProfile sensitivity_bound(const WeightedDataset& data, const Query& centers, double alpha,
                                     const SensitivityOptions& options) {
    check_same_dim(data.dim(), centers.dim(), "sensitivity_bound");
    const bool uniform = data.has_uniform_weights();
    if (!uniform && !options.generalized_weights) {
        throw std::invalid_argument(
            "sensitivity bound needs uniform weights; enable generalized weights for weighted input");
    }
    const std::size_t n = data.size();
    const std::size_t k = centers.k();
    const double nd = static_cast<double>(n);

    SensitivityProfile p;
    p.alpha = alpha;
    p.generalized = !uniform;
    p.constants = options.constants;

    // Pass 1: assignment and per-cluster statistics.
    const Assignment a = assign(data, centers);
    p.cluster_of = a.nearest;
    p.cluster_sizes.assign(k, 0);
    p.cluster_mass.assign(k, 0.0);
    p.cluster_cost.assign(k, 0.0);
    double seed_cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = a.nearest[i];
        ++p.cluster_sizes[c];
        if (uniform) {
            p.cluster_mass[c] += 1.0 / nd;
            p.cluster_cost[c] += a.cost[i];
            seed_cost += a.cost[i];
        } else {
            const double nu = data.weight(i) / data.total_weight();
            p.cluster_mass[c] += nu;
            p.cluster_cost[c] += nu * a.cost[i];
            seed_cost += nu * a.cost[i];
        }
    }
    p.mean_seed_cost = uniform ? seed_cost / nd : seed_cost;

    const bool lemma = options.constants == SensitivityConstants::Lemma;
    const double point_coef = lemma ? 2.0 * alpha : alpha;
    const double cluster_coef = lemma ? 4.0 * alpha : 2.0 * alpha;
    const double cbar = p.mean_seed_cost;

    // Pass 2: evaluate the bound per point.
    p.s.resize(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t c = a.nearest[i];
            double s;
            if (uniform) {
                const double size = static_cast<double>(p.cluster_sizes[c]);
                s = 4.0 * nd / size;
                if (cbar > 0.0) {
                    s += point_coef * a.cost[i] / cbar + cluster_coef * p.cluster_cost[c] / (size * cbar);
                }
            } else {
                const double mass = p.cluster_mass[c];
                if (mass <= 0.0) {
                    // Only zero-weight points live here; they are never sampled.
                    s = 0.0;
                } else {
                    s = 4.0 / mass;
                    if (cbar > 0.0) {
                        s += point_coef * a.cost[i] / cbar + cluster_coef * p.cluster_cost[c] / (mass * cbar);
                    }
                }
            }
            p.s[i] = s;
        }
    });

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += uniform ? p.s[i] : data.weight(i) / data.total_weight() * p.s[i];
    }
    p.total = uniform ? total / nd : total;
    return p;
}

std::vector<double> exact_sensitivity_1means(const WeightedDataset& data) {
    const std::size_t n = data.size();
    const std::size_t dim = data.dim();
    const double mass = data.total_weight();

    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.point(i);
        for (std::size_t j = 0; j < dim; ++j) {
            mean[j] += data.weight(i) * x[j];
        }
    }
    for (double& m : mean) {
        m /= mass;
    }

    std::vector<double> dev(n);
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dev[i] = squared_distance(data.point(i), mean);
        spread += data.weight(i) * dev[i];
    }
    if (!(spread > 0.0)) {
        throw std::invalid_argument(
            "all positive-weight points coincide; every sensitivity equals 1/total_weight");
    }

    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        sigma[i] = 1.0 / mass + dev[i] / spread;
    }
    return sigma;
}

std::vector<double> grid_sensitivity_oracle(const WeightedDataset& data, std::size_t k,
                                            std::span<const Query> grid) {
    if (grid.empty()) {
        throw std::invalid_argument("query grid is empty");
    }
    const std::size_t n = data.size();
    std::vector<double> best(n, 0.0);
    std::size_t used = 0;
    for (const Query& q : grid) {
        if (q.k() != k) {
            throw std::invalid_argument("grid query has the wrong number of centers");
        }
        const Assignment a = assign(data, q);
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cost += data.weight(i) * a.cost[i];
        }
        if (!(cost > 0.0)) {
            continue;
        }
        ++used;
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::max(best[i], a.cost[i] / cost);
        }
    }
    if (used == 0) {
        throw std::invalid_argument("every grid query has zero cost; sensitivity ratio undefined");
    }
    return best;
}

}  // namespace coreset
