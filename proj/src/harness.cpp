#include "coreset/harness.hpp"

#include "coreset/parallel.hpp"
#include "coreset/random.hpp"
#include "coreset/seeding.hpp"
#include "coreset/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coreset {

std::string_view to_string(QueryOrigin origin) noexcept {
    switch (origin) {
        case QueryOrigin::RandomBox: return "random_box";
        case QueryOrigin::D2Seeded: return "d2_seeded";
        case QueryOrigin::ReferenceOptimum: return "reference_optimum";
        case QueryOrigin::PerturbedOptimum: return "perturbed_optimum";
        case QueryOrigin::User: return "user";
    }
    return "user";
}

void QuerySuite::add(Query q, QueryOrigin origin) {
    if (!queries.empty()) {
        check_same_dim(q.dim(), queries.front().dim(), "query suite");
        if (q.k() != queries.front().k()) {
            throw std::invalid_argument("all queries in a suite must have the same k");
        }
    }
    queries.push_back(std::move(q));
    origins.push_back(origin);
}

QuerySuite default_query_suite(const WeightedDataset& data, std::size_t k, std::uint64_t seed,
                               const SuiteOptions& options) {
    if (k == 0) {
        throw std::invalid_argument("query suite needs k >= 1");
    }
    const std::size_t d = data.dim();
    Rng rng(derive_seed(seed, stream::suite));
    QuerySuite suite;

    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    }
    for (std::size_t r = 0; r < options.random_box; ++r) {
        std::vector<double> centers(k * d);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                centers[c * d + j] = lo[j] + (hi[j] - lo[j]) * uniform01(rng);
            }
        }
        suite.add(Query(std::move(centers), d), QueryOrigin::RandomBox);
    }

    for (std::size_t r = 0; r < options.d2_seeded; ++r) {
        suite.add(d2_sample(data, k, rng).centers, QueryOrigin::D2Seeded);
    }

    const Query reference = options.reference
                                ? *options.reference
                                : lloyd_restarts(data, k, std::max<std::size_t>(options.reference_restarts, 1),
                                                 derive_seed(seed, stream::solve))
                                      .query;
    suite.add(reference, QueryOrigin::ReferenceOptimum);

    if (options.perturbations > 0) {
        const Assignment a = assign(data, reference);
        double mean_dist = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            mean_dist += data.weight(i) * std::sqrt(a.cost[i]);
        }
        mean_dist /= data.total_weight();
        const double scale = options.perturbation_scale * mean_dist;
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t r = 0; r < options.perturbations; ++r) {
            std::vector<double> centers(reference.centers().begin(), reference.centers().end());
            for (double& v : centers) {
                v += scale * noise(rng);
            }
            suite.add(Query(std::move(centers), d), QueryOrigin::PerturbedOptimum);
        }
    }
    return suite;
}

ErrorReport coreset_error(const WeightedDataset& full, const WeightedDataset& coreset,
                          const QuerySuite& suite) {
    if (suite.size() == 0) {
        throw std::invalid_argument("query suite is empty");
    }
    check_same_dim(full.dim(), coreset.dim(), "coreset_error");
    std::vector<QueryError> all(suite.size());
    parallel_tasks(suite.size(), [&](std::size_t i) {
        QueryError& e = all[i];
        e.index = i;
        e.origin = suite.origins[i];
        const CostModel model = CostModel::squared_euclidean();
        e.full_cost = total_cost(full, suite.queries[i], model, Summation::Compensated);
        e.coreset_cost = total_cost(coreset, suite.queries[i], model, Summation::Compensated);
        const double diff = std::abs(e.full_cost - e.coreset_cost);
        e.error = e.full_cost > 0.0 ? diff / e.full_cost : diff;
    });

    ErrorReport report;
    for (auto& e : all) {
        if (e.full_cost > 0.0) {
            if (report.errors.empty() || e.error > report.max_error) {
                report.max_error = e.error;
                report.worst = e.index;
            }
            report.errors.push_back(e);
        } else {
            report.zero_cost.push_back(e);
        }
    }
    if (report.errors.empty()) {
        throw std::invalid_argument("every query in the suite has zero cost on the full data");
    }
    return report;
}

GDiagnostics g_function(const WeightedDataset& data, std::span<const double> q,
                        std::span<const double> s, const Query& query) {
    const std::size_t n = data.size();
    if (q.size() != n || s.size() != n) {
        throw std::invalid_argument("q and s must have one entry per point");
    }
    const double w = data.total_weight();
    const Assignment a = assign(data, query);

    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        terms[i] = data.weight(i) / w * s[i];
    }
    const double total = compensated_sum(terms);
    for (std::size_t i = 0; i < n; ++i) {
        terms[i] = data.weight(i) / w * a.cost[i];
    }
    const double cost = compensated_sum(terms);
    if (!(total > 0.0)) {
        throw std::invalid_argument("total sensitivity must be positive");
    }
    if (!(cost > 0.0)) {
        throw std::invalid_argument("g is undefined for a zero-cost query");
    }

    GDiagnostics out;
    out.g.resize(n);
    out.inverse_total = 1.0 / total;
    for (std::size_t i = 0; i < n; ++i) {
        const double num = data.weight(i) / w * a.cost[i];
        if (q[i] > 0.0) {
            out.g[i] = num / (cost * total * q[i]);
        } else {
            out.g[i] = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        terms[i] = q[i] * out.g[i];
    }
    out.weighted_mean = compensated_sum(terms);
    const auto [lo, hi] = std::minmax_element(out.g.begin(), out.g.end());
    out.min = *lo;
    out.max = *hi;
    out.bound_violated = out.max > 1.0 + 1e-9;
    return out;
}

std::size_t hoeffding_m(double total_sensitivity, double epsilon, double delta) {
    if (!(total_sensitivity > 0.0) || !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("hoeffding_m needs S > 0, epsilon > 0, delta in (0,1)");
    }
    const double m = total_sensitivity * total_sensitivity / (2.0 * epsilon * epsilon) * std::log(2.0 / delta);
    return static_cast<std::size_t>(std::ceil(m));
}

MixtureSample generate_mixture(const GaussianMixture& p, std::uint64_t seed) {
    if (p.n == 0 || p.d == 0 || p.k == 0 || p.k > p.n) {
        throw std::invalid_argument("mixture needs n >= k >= 1 and d >= 1");
    }
    if (!(p.separation >= 0.0) || !(p.sigma >= 0.0) || !std::isfinite(p.separation) ||
        !std::isfinite(p.sigma)) {
        throw std::invalid_argument("mixture separation and sigma must be finite and non-negative");
    }
    Rng rng(seed);
    // Centers are drawn in a box wide enough to fit k well-separated points;
    // rejection keeps the pairwise distance at least `separation`.
    const double side = p.separation * std::max(1.0, 2.0 * std::pow(static_cast<double>(p.k), 1.0 / p.d));
    std::vector<double> centers;
    const double min_sq = p.separation * p.separation;
    for (std::size_t c = 0; c < p.k; ++c) {
        std::vector<double> cand(p.d);
        for (int attempt = 0; attempt < 10000; ++attempt) {
            for (double& v : cand) {
                v = side * uniform01(rng);
            }
            bool ok = true;
            for (std::size_t o = 0; o < c && ok; ++o) {
                ok = squared_distance(cand, std::span<const double>(centers).subspan(o * p.d, p.d)) >= min_sq;
            }
            if (ok) {
                break;
            }
        }
        centers.insert(centers.end(), cand.begin(), cand.end());
    }

    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, p.k - 1);
    std::vector<double> points(p.n * p.d);
    std::vector<std::size_t> labels(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        // The first k points cover every component so none is empty.
        const std::size_t c = i < p.k ? i : pick(rng);
        labels[i] = c;
        for (std::size_t j = 0; j < p.d; ++j) {
            points[i * p.d + j] = centers[c * p.d + j] + p.sigma * noise(rng);
        }
    }
    return MixtureSample{WeightedDataset::uniform(std::move(points), p.d), Query(std::move(centers), p.d),
                         std::move(labels)};
}

WeightedDataset generate(const GeneratorKind& kind, std::uint64_t seed) {
    if (const auto* a = std::get_if<Adversarial>(&kind)) {
        if (a->n < 2) {
            throw std::invalid_argument("adversarial set needs n >= 2");
        }
        std::vector<double> points(a->n, 0.0);
        points.back() = 1.0;
        return WeightedDataset::uniform(std::move(points), 1);
    }
    if (const auto* g = std::get_if<GaussianMixture>(&kind)) {
        return generate_mixture(*g, seed).data;
    }
    const auto& u = std::get<UniformBox>(kind);
    if (u.n == 0 || u.d == 0) {
        throw std::invalid_argument("uniform box needs n >= 1 and d >= 1");
    }
    Rng rng(seed);
    std::vector<double> points(u.n * u.d);
    for (double& v : points) {
        v = uniform01(rng);
    }
    return WeightedDataset::uniform(std::move(points), u.d);
}

Calibration calibrate_c_size(const WeightedDataset& data, std::size_t k, double epsilon, double delta,
                             std::span<const double> candidates, std::size_t trials, std::uint64_t seed,
                             double target_rate, const BuildOptions& build, const SuiteOptions& suite_options) {
    if (candidates.empty() || trials == 0) {
        throw std::invalid_argument("calibration needs candidates and at least one trial");
    }
    const QuerySuite suite = default_query_suite(data, k, seed, suite_options);
    std::vector<double> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());

    Calibration out;
    for (double c : sorted) {
        CalibrationStep step;
        step.c_size = c;
        step.m = recommended_m({data.dim(), k, epsilon, delta / 2.0, c, std::nullopt});
        BuildOptions opts = build;
        opts.c_size = c;
        step.errors.resize(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            const Coreset cs = build_kmeans_coreset(data, k, epsilon, delta, std::nullopt, derive_seed(seed, t), opts);
            step.errors[t] = coreset_error(data, cs.data, suite).max_error;
        }
        const auto ok = std::count_if(step.errors.begin(), step.errors.end(),
                                      [&](double e) { return e <= epsilon; });
        step.success_rate = static_cast<double>(ok) / static_cast<double>(trials);
        const bool done = step.success_rate >= target_rate;
        out.steps.push_back(std::move(step));
        if (done) {
            out.c_size = c;
            break;
        }
    }
    return out;
}

}  // namespace coreset
