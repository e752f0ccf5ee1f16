#include "coreset/seeding.hpp"

#include "coreset/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace coreset {

Seeding d2_sample(const WeightedDataset& data, std::size_t k, Rng& rng) {
    if (k == 0) {
        throw std::invalid_argument("d2_sample needs k >= 1");
    }
    const std::size_t n = data.size();
    const std::size_t dim = data.dim();

    Seeding out{Query(std::vector<double>(data.point(0).begin(), data.point(0).end()), dim), {}, false};
    std::vector<double> centers;
    centers.reserve(k * dim);

    auto take = [&](std::size_t idx) {
        out.indices.push_back(idx);
        const auto p = data.point(idx);
        centers.insert(centers.end(), p.begin(), p.end());
    };

    const DiscreteSampler by_weight(data.weights());
    take(by_weight(rng));

    std::vector<double> nearest(n);
    std::vector<double> mass(n);
    const auto first = data.point(out.indices.front());
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            nearest[i] = squared_distance(data.point(i), first);
        }
    });

    for (std::size_t round = 1; round < k; ++round) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mass[i] = data.weight(i) * nearest[i];
            total += mass[i];
        }
        std::size_t idx;
        if (total > 0.0) {
            idx = DiscreteSampler(mass)(rng);
        } else {
            // Every positive-weight point already coincides with a center.
            out.padded = true;
            idx = by_weight(rng);
        }
        take(idx);
        const auto newest = data.point(idx);
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                nearest[i] = std::min(nearest[i], squared_distance(data.point(i), newest));
            }
        });
    }

    out.centers = Query(std::move(centers), dim);
    return out;
}

double d2_alpha(std::size_t k) {
    return 16.0 * (std::log2(static_cast<double>(k)) + 2.0);
}

std::size_t bicriteria_runs(double delta, double run_factor) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (!(run_factor > 0.0)) {
        throw std::invalid_argument("bicriteria run factor must be positive");
    }
    const double runs = std::ceil(run_factor * std::log(1.0 / delta));
    return runs < 1.0 ? 1 : static_cast<std::size_t>(runs);
}

Bicriteria bicriteria(const WeightedDataset& data, std::size_t k, double delta, std::uint64_t seed,
                      const BicriteriaOptions& options) {
    const std::size_t runs = bicriteria_runs(delta, options.run_factor);
    std::vector<Seeding> seedings(runs, Seeding{Query({0.0}, 1), {}, false});
    std::vector<double> costs(runs);
    parallel_tasks(runs, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        seedings[r] = d2_sample(data, k, rng);
        costs[r] = total_cost(data, seedings[r].centers);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs; ++r) {
        if (costs[r] < costs[best]) {
            best = r;
        }
    }
    return Bicriteria{std::move(seedings[best].centers),
                      std::move(seedings[best].indices),
                      d2_alpha(k),
                      1.0,
                      costs[best],
                      runs,
                      best,
                      costs,
                      seedings[best].padded};
}

}  // namespace coreset
