#pragma once

#include "coreset/builder.hpp"
#include "coreset/core_model.hpp"
#include "coreset/sensitivity.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace coreset {

enum class QueryOrigin { RandomBox, D2Seeded, ReferenceOptimum, PerturbedOptimum, User };

std::string_view to_string(QueryOrigin origin) noexcept;

/// Finite set of test queries. The checker can only ever report a lower
/// bound on the worst error over all queries.
struct QuerySuite {
    std::vector<Query> queries;
    std::vector<QueryOrigin> origins;

    void add(Query q, QueryOrigin origin);
    std::size_t size() const noexcept { return queries.size(); }
};

struct SuiteOptions {
    std::size_t random_box = 50;
    std::size_t d2_seeded = 20;
    std::size_t perturbations = 10;
    /// Perturbation std-dev as a multiple of the mean nearest-center distance
    /// under the reference solution.
    double perturbation_scale = 0.1;
    std::size_t reference_restarts = 10;
    /// Use this solution as the reference optimum instead of running Lloyd.
    std::optional<Query> reference;
};

/// Random box queries, D^2 seedings, a reference optimum and perturbations of
/// it, in that order. Randomness comes from derive_seed(seed, stream::suite).
QuerySuite default_query_suite(const WeightedDataset& data, std::size_t k, std::uint64_t seed,
                               const SuiteOptions& options = {});

struct QueryError {
    std::size_t index = 0;  // position in the suite
    QueryOrigin origin = QueryOrigin::User;
    double full_cost = 0.0;
    double coreset_cost = 0.0;
    double error = 0.0;  // relative; absolute for zero-cost queries
};

struct ErrorReport {
    std::vector<QueryError> errors;     // queries with positive full cost
    std::vector<QueryError> zero_cost;  // skipped in the maximum, absolute error
    double max_error = 0.0;
    std::size_t worst = 0;  // suite index of the maximum
};

/// Per-query |cost(X,Q) - cost(C,Q)| / cost(X,Q) with compensated sums.
/// Throws if every query has zero cost on the full data.
ErrorReport coreset_error(const WeightedDataset& full, const WeightedDataset& coreset,
                          const QuerySuite& suite);

struct GDiagnostics {
    std::vector<double> g;
    double min = 0.0;
    double max = 0.0;
    double weighted_mean = 0.0;   // sum_x q(x) g(x)
    double inverse_total = 0.0;   // 1/S
    bool bound_violated = false;  // some g > 1 + 1e-9
};

/// g_Q(x) = nu(x) f_Q(x) / (cost_nu(X,Q) S q(x)) with nu the normalized
/// weights and S = sum nu s. With q = nu s / S this is f_Q(x)/(cost s(x)),
/// which lies in [0,1] whenever s bounds the sensitivity.
GDiagnostics g_function(const WeightedDataset& data, std::span<const double> q,
                        std::span<const double> s, const Query& query);

/// Single-query Hoeffding size ceil(S^2 / (2 eps^2) ln(2/delta)).
std::size_t hoeffding_m(double total_sensitivity, double epsilon, double delta);

struct Adversarial {
    std::size_t n = 0;
};

struct GaussianMixture {
    std::size_t n = 0;
    std::size_t d = 2;
    std::size_t k = 1;
    double separation = 10.0;  // minimum distance between planted centers
    double sigma = 1.0;
};

struct UniformBox {
    std::size_t n = 0;
    std::size_t d = 1;
};

using GeneratorKind = std::variant<Adversarial, GaussianMixture, UniformBox>;

/// n-1 points at 0 and one at 1 (Adversarial), Gaussian blobs, or uniform
/// points in [0,1]^d. Weights are 1/n. Deterministic per seed.
WeightedDataset generate(const GeneratorKind& kind, std::uint64_t seed);

struct MixtureSample {
    WeightedDataset data;
    Query planted;
    std::vector<std::size_t> labels;
};

MixtureSample generate_mixture(const GaussianMixture& params, std::uint64_t seed);

struct CalibrationStep {
    double c_size = 0.0;
    std::size_t m = 0;
    std::vector<double> errors;  // one per trial
    double success_rate = 0.0;   // fraction of trials with error <= epsilon
};

struct Calibration {
    std::vector<CalibrationStep> steps;
    std::optional<double> c_size;  // smallest candidate meeting the target rate
};

/// Tries c_size candidates in increasing order; each is run for `trials`
/// seeds and scored on the default suite. Stops at the first candidate whose
/// success rate reaches `target_rate`.
Calibration calibrate_c_size(const WeightedDataset& data, std::size_t k, double epsilon, double delta,
                             std::span<const double> candidates, std::size_t trials, std::uint64_t seed,
                             double target_rate = 0.95, const BuildOptions& build = {},
                             const SuiteOptions& suite = {});

}  // namespace coreset
