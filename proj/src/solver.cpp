#include "coreset/solver.hpp"

#include "coreset/parallel.hpp"
#include "coreset/seeding.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace coreset {

namespace {

double weighted_sum(const WeightedDataset& data, const Assignment& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        sum += data.weight(i) * a.cost[i];
    }
    return sum;
}

}  // namespace

Solution weighted_lloyd(const WeightedDataset& data, std::size_t k, const Query& init,
                        const LloydOptions& options) {
    if (init.k() != k) {
        throw std::invalid_argument("Lloyd initialization has " + std::to_string(init.k()) +
                                    " centers, expected " + std::to_string(k));
    }
    check_same_dim(data.dim(), init.dim(), "weighted_lloyd");
    if (options.max_iters == 0) {
        throw std::invalid_argument("Lloyd needs max_iters >= 1");
    }
    if (count_distinct_points(data) < k) {
        throw std::invalid_argument("k = " + std::to_string(k) +
                                    " exceeds the number of distinct points");
    }

    const std::size_t n = data.size();
    const std::size_t dim = data.dim();
    Query centers = init;
    Assignment a = assign(data, centers);
    double objective = weighted_sum(data, a);

    Solution sol{centers, objective, 0, false};
    std::vector<double> sums(k * dim);
    std::vector<double> mass(k);
    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(mass.begin(), mass.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = a.nearest[i];
            const double w = data.weight(i);
            const auto x = data.point(i);
            mass[c] += w;
            for (std::size_t j = 0; j < dim; ++j) {
                sums[c * dim + j] += w * x[j];
            }
        }

        std::vector<double> next(k * dim);
        std::vector<double> weighted_cost;
        for (std::size_t c = 0; c < k; ++c) {
            if (mass[c] > 0.0) {
                for (std::size_t j = 0; j < dim; ++j) {
                    next[c * dim + j] = sums[c * dim + j] / mass[c];
                }
                continue;
            }
            if (weighted_cost.empty()) {
                weighted_cost.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    weighted_cost[i] = data.weight(i) * a.cost[i];
                }
            }
            const auto worst = static_cast<std::size_t>(
                std::max_element(weighted_cost.begin(), weighted_cost.end()) - weighted_cost.begin());
            weighted_cost[worst] = -1.0;
            const auto p = data.point(worst);
            std::copy(p.begin(), p.end(), next.begin() + static_cast<std::ptrdiff_t>(c * dim));
        }

        centers = Query(std::move(next), dim);
        a = assign(data, centers);
        const double updated = weighted_sum(data, a);
        sol.iterations = it;
        const bool done = objective <= 0.0 || objective - updated <= options.tol * objective;
        objective = updated;
        if (done) {
            sol.converged = true;
            break;
        }
    }
    sol.query = std::move(centers);
    sol.objective = objective;
    return sol;
}

Solution lloyd_restarts(const WeightedDataset& data, std::size_t k, std::size_t restarts,
                        std::uint64_t seed, const LloydOptions& options) {
    if (restarts == 0) {
        throw std::invalid_argument("at least one restart is required");
    }
    std::vector<std::optional<Solution>> runs(restarts);
    parallel_tasks(restarts, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        const Seeding init = d2_sample(data, k, rng);
        runs[r] = weighted_lloyd(data, k, init.centers, options);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (runs[r]->objective < runs[best]->objective) {
            best = r;
        }
    }
    return std::move(*runs[best]);
}

std::uint64_t count_partitions(std::size_t n, std::size_t k) {
    constexpr std::uint64_t saturated = std::numeric_limits<std::uint64_t>::max();
    if (n == 0) {
        return 1;
    }
    const std::size_t blocks = std::min(n, k);
    auto add = [](std::uint64_t a, std::uint64_t b) { return a > saturated - b ? saturated : a + b; };
    auto mul = [](std::uint64_t a, std::uint64_t b) {
        return (b != 0 && a > saturated / b) ? saturated : a * b;
    };
    // stirling[j] = S(i, j) for the current row i.
    std::vector<std::uint64_t> stirling(blocks + 1, 0);
    stirling[0] = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = std::min(i, blocks); j >= 1; --j) {
            stirling[j] = add(mul(j, stirling[j]), stirling[j - 1]);
        }
        stirling[0] = 0;
    }
    std::uint64_t total = 0;
    for (std::size_t j = 1; j <= blocks; ++j) {
        total = add(total, stirling[j]);
    }
    return total;
}

Solution ptas_exhaustive(const WeightedDataset& data, std::size_t k, const PtasOptions& options) {
    if (k == 0) {
        throw std::invalid_argument("PTAS needs k >= 1");
    }
    const std::size_t dim = data.dim();

    // Collapse duplicate positive-weight points.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.weight(i) > 0.0) {
            order.push_back(i);
        }
    }
    auto less = [&](std::size_t a, std::size_t b) {
        const auto pa = data.point(a);
        const auto pb = data.point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<double> pts;
    std::vector<double> ws;
    for (std::size_t t = 0; t < order.size(); ++t) {
        if (t > 0 && !less(order[t - 1], order[t])) {
            ws.back() += data.weight(order[t]);
            continue;
        }
        const auto p = data.point(order[t]);
        pts.insert(pts.end(), p.begin(), p.end());
        ws.push_back(data.weight(order[t]));
    }
    const std::size_t n = ws.size();

    const std::uint64_t required = count_partitions(n, k);
    if (required > options.partition_cap) {
        throw std::invalid_argument("exhaustive search over " + std::to_string(n) + " points needs " +
                                    std::to_string(required) + " partitions; cap is " +
                                    std::to_string(options.partition_cap));
    }

    std::vector<std::size_t> label(n, 0);
    std::vector<std::size_t> prefix_max(n, 0);
    std::vector<double> sums(k * dim);
    std::vector<double> mass(k);
    std::vector<double> best_centers;
    std::size_t best_blocks = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    std::uint64_t visited = 0;

    while (true) {
        ++visited;
        const std::size_t blocks = prefix_max[n - 1] + 1;
        std::fill(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(blocks * dim), 0.0);
        std::fill(mass.begin(), mass.begin() + static_cast<std::ptrdiff_t>(blocks), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            mass[label[i]] += ws[i];
            for (std::size_t j = 0; j < dim; ++j) {
                sums[label[i] * dim + j] += ws[i] * pts[i * dim + j];
            }
        }
        for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t j = 0; j < dim; ++j) {
                sums[b * dim + j] /= mass[b];
            }
        }
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::span<const double> x(pts.data() + i * dim, dim);
            const std::span<const double> c(sums.data() + label[i] * dim, dim);
            cost += ws[i] * squared_distance(x, c);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best_blocks = blocks;
            best_centers.assign(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(blocks * dim));
        }

        // Advance to the next restricted growth string with at most k blocks.
        std::size_t i = n;
        while (i-- > 1) {
            if (label[i] + 1 < k && label[i] <= prefix_max[i - 1]) {
                break;
            }
        }
        if (i == 0 || i >= n) {
            break;
        }
        ++label[i];
        prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            label[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }

    for (std::size_t b = best_blocks; b < k; ++b) {
        best_centers.insert(best_centers.end(), best_centers.begin(),
                            best_centers.begin() + static_cast<std::ptrdiff_t>(dim));
    }
    Query query(std::move(best_centers), dim);
    const double objective = total_cost(data, query);
    return Solution{std::move(query), objective, static_cast<std::size_t>(visited), true};
}

namespace {

Solution solve_on(const WeightedDataset& data, std::size_t k, std::size_t restarts, std::uint64_t seed,
                  const CoresetSolveOptions& options) {
    if (options.method == SolveMethod::Ptas) {
        return ptas_exhaustive(data, k, options.ptas);
    }
    return lloyd_restarts(data, k, restarts, seed, options.lloyd);
}

}  // namespace

CoresetSolveReport solve_with_coreset(const WeightedDataset& full, const WeightedDataset& coreset,
                                      std::size_t k, std::uint64_t seed,
                                      const CoresetSolveOptions& options) {
    check_same_dim(full.dim(), coreset.dim(), "solve_with_coreset");
    const std::uint64_t solve_seed = derive_seed(seed, stream::solve);

    const Solution on_coreset = solve_on(coreset, k, options.restarts, solve_seed, options);
    const Solution reference = solve_on(full, k, options.reference_restarts, solve_seed, options);

    CoresetSolveReport r{on_coreset.query, reference.query};
    r.objective_on_coreset = on_coreset.objective;
    r.objective_on_full = total_cost(full, on_coreset.query);
    r.reference_objective = reference.objective;
    r.reference_exact = options.method == SolveMethod::Ptas;
    r.iterations = on_coreset.iterations;
    if (r.reference_objective > 0.0) {
        r.ratio = r.objective_on_full / r.reference_objective;
    } else {
        r.ratio = r.objective_on_full == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return r;
}

CoresetSolveResult solve_via_coreset(const WeightedDataset& full, std::size_t k, double epsilon,
                                     double delta, std::uint64_t seed,
                                     const CoresetSolveOptions& options) {
    Coreset c = build_kmeans_coreset(full, k, epsilon, delta, options.m, seed, options.build);
    CoresetSolveReport report = solve_with_coreset(full, c.data, k, seed, options);
    return CoresetSolveResult{std::move(c), std::move(report)};
}

}  // namespace coreset
