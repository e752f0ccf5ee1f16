#include "coreset/harness.hpp"
#include "coreset/solver.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace coreset;

TEST_CASE("default suite composition") {
    const auto data = testutil::random_dataset(500, 2, 1);
    const auto suite = default_query_suite(data, 3, 4);
    CHECK(suite.size() == 50 + 20 + 1 + 10);
    CHECK(suite.origins[0] == QueryOrigin::RandomBox);
    CHECK(suite.origins[50] == QueryOrigin::D2Seeded);
    CHECK(suite.origins[70] == QueryOrigin::ReferenceOptimum);
    CHECK(suite.origins[71] == QueryOrigin::PerturbedOptimum);
    for (const auto& q : suite.queries) {
        CHECK(q.k() == 3);
        CHECK(q.dim() == 2);
    }
    const auto again = default_query_suite(data, 3, 4);
    CHECK(again.queries == suite.queries);

    SuiteOptions opts;
    opts.reference = Query({0.0, 0.0, 1.0, 1.0, 2.0, 2.0}, 2);
    opts.perturbations = 0;
    const auto custom = default_query_suite(data, 3, 4, opts);
    CHECK(custom.size() == 71);
    CHECK(custom.queries.back() == *opts.reference);

    QuerySuite mixed;
    mixed.add(Query({0.0}, 1), QueryOrigin::User);
    CHECK_THROWS_AS(mixed.add(Query({0.0, 1.0}, 1), QueryOrigin::User), std::invalid_argument);
    CHECK_THROWS_AS(mixed.add(Query({0.0, 1.0}, 2), QueryOrigin::User), std::invalid_argument);
}

TEST_CASE("identity coreset has zero error") {
    const auto data = testutil::random_dataset(300, 3, 2);
    const auto suite = default_query_suite(data, 4, 2);
    const auto r = coreset_error(data, data, suite);
    CHECK(r.max_error == 0.0);
    CHECK(r.errors.size() == suite.size());
}

TEST_CASE("a uniform sample without the outlier has error exactly 1 at Q = {0}") {
    const auto data = generate(Adversarial{10000}, 0);
    QuerySuite suite;
    suite.add(Query({0.0}, 1), QueryOrigin::User);
    std::uint64_t seed = 0;
    Coreset c = uniform_baseline(data, 100, seed);
    while (c.source_index.back() == data.size() - 1) {
        c = uniform_baseline(data, 100, ++seed);
    }
    const auto r = coreset_error(data, c.data, suite);
    CHECK(r.errors[0].coreset_cost == 0.0);
    CHECK(r.max_error == 1.0);
}

TEST_CASE("zero-cost queries are listed separately") {
    const auto data = testutil::line({0.0, 1.0});
    QuerySuite suite;
    suite.add(Query({0.0, 1.0}, 1), QueryOrigin::User);
    suite.add(Query({0.0, 0.5}, 1), QueryOrigin::User);
    const WeightedDataset c({0.0, 1.0, 3.0}, {0.5, 0.5, 0.1}, 1);
    const auto r = coreset_error(data, c, suite);
    CHECK(r.zero_cost.size() == 1);
    CHECK(r.zero_cost[0].error == doctest::Approx(0.1 * 4.0));
    CHECK(r.errors.size() == 1);
    CHECK(r.worst == 1);

    QuerySuite only_zero;
    only_zero.add(Query({0.0, 1.0}, 1), QueryOrigin::User);
    CHECK_THROWS_AS(coreset_error(data, c, only_zero), std::invalid_argument);
    CHECK_THROWS_AS(coreset_error(data, c, QuerySuite{}), std::invalid_argument);
}

TEST_CASE("suite error is monotone as queries are added") {
    const auto data = testutil::random_dataset(400, 2, 3);
    const auto c = build_kmeans_coreset(data, 2, 0.2, 0.1, 40, 3);
    const auto full = default_query_suite(data, 2, 3);
    QuerySuite partial;
    double previous = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        partial.add(full.queries[i], full.origins[i]);
        const double e = coreset_error(data, c.data, partial).max_error;
        CHECK(e >= previous);
        previous = e;
    }
}

TEST_CASE("g stays in [0,1] under the trivial bound") {
    const auto data = testutil::random_dataset(200, 2, 4);
    const std::vector<double> s(200, 200.0);
    const std::vector<double> q(200, 1.0 / 200.0);
    for (std::uint64_t t = 0; t < 5; ++t) {
        const auto g = g_function(data, q, s, testutil::random_query(2, 2, t));
        CHECK(g.min >= 0.0);
        CHECK(g.max <= 1.0);
        CHECK_FALSE(g.bound_violated);
        CHECK(g.inverse_total == doctest::Approx(1.0 / 200.0));
        CHECK(std::abs(g.weighted_mean - g.inverse_total) <= 1e-9);
    }
}

TEST_CASE("g identities with sensitivity-derived q on the adversarial set") {
    const auto data = generate(Adversarial{1000}, 0);
    const auto r = build_kmeans_coreset_detailed(data, 1, 0.1, 0.1, 10, 1);
    for (double center : {0.0, 0.5, 1.0, -3.0, 7.0}) {
        const auto g = g_function(data, r.q, r.sensitivity.s, Query({center}, 1));
        CHECK(g.min >= -1e-9);
        CHECK(g.max <= 1.0 + 1e-9);
        CHECK(std::abs(g.weighted_mean - 1.0 / r.sensitivity.total) <= 1e-9);
    }
}

TEST_CASE("g flags a bound that is too small") {
    const auto data = testutil::line({0.0, 0.0, 0.0, 1.0});
    const std::vector<double> s(4, 1.0);
    const std::vector<double> q(4, 0.25);
    const auto g = g_function(data, q, s, Query({0.0}, 1));
    CHECK(g.max == doctest::Approx(4.0));
    CHECK(g.bound_violated);
    CHECK_THROWS_AS(g_function(data, q, s, Query({0.0, 1.0}, 1)), std::invalid_argument);
}

TEST_CASE("Hoeffding sample size") {
    CHECK(hoeffding_m(2.0, 0.1, 0.05) == 738);
    const auto a = hoeffding_m(2.0, 0.2, 0.05);
    const auto b = hoeffding_m(2.0, 0.1, 0.05);
    CHECK(b <= 4 * a);
    CHECK(b + 3 >= 4 * a);
    // S = n grows quadratically.
    const double r = static_cast<double>(hoeffding_m(2000.0, 0.1, 0.05)) / hoeffding_m(1000.0, 0.1, 0.05);
    CHECK(r == doctest::Approx(4.0).epsilon(1e-6));
    CHECK_THROWS_AS(hoeffding_m(0.0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("generators") {
    const auto adv = generate(Adversarial{4}, 0);
    CHECK(std::vector<double>(adv.points().begin(), adv.points().end()) == std::vector<double>{0, 0, 0, 1});
    CHECK(adv.weight(0) == 0.25);
    CHECK_THROWS_AS(generate(Adversarial{1}, 0), std::invalid_argument);

    const auto box = generate(UniformBox{1000, 3}, 5);
    CHECK(box == generate(UniformBox{1000, 3}, 5));
    CHECK_FALSE(box == generate(UniformBox{1000, 3}, 6));
    for (double v : box.points()) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }

    // Sorted and shuffled versions of a stream hold the same multiset.
    const auto line = generate(UniformBox{500, 1}, 7);
    std::vector<double> sorted(line.points().begin(), line.points().end());
    std::vector<double> shuffled = sorted;
    std::sort(sorted.begin(), sorted.end());
    std::shuffle(shuffled.begin(), shuffled.end(), Rng(1));
    std::sort(shuffled.begin(), shuffled.end());
    CHECK(sorted == shuffled);

    CHECK_THROWS_AS(generate(GaussianMixture{2, 2, 3, 1.0, 1.0}, 0), std::invalid_argument);
}

TEST_CASE("mixture centers are recovered by exhaustive search on a subsample") {
    const GaussianMixture params{3000, 2, 3, 20.0, 1.0};
    const auto mix = generate_mixture(params, 11);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a + 1; b < 3; ++b) {
            CHECK(std::sqrt(squared_distance(mix.planted.center(a), mix.planted.center(b))) >= 20.0);
        }
    }
    // 12 points, four from each component.
    std::vector<std::size_t> pick;
    std::size_t per[3] = {};
    for (std::size_t i = 0; i < mix.data.size() && pick.size() < 12; ++i) {
        if (per[mix.labels[i]] < 4) {
            ++per[mix.labels[i]];
            pick.push_back(i);
        }
    }
    const auto sub = mix.data.subset(pick);
    const auto sol = ptas_exhaustive(sub, 3);
    const double tol = 3.0 * params.sigma / std::sqrt(12.0 / 3.0);
    std::vector<bool> used(3, false);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto pc = point_cost(sol.query.center(c), mix.planted);
        CHECK(std::sqrt(pc.cost) <= tol);
        CHECK_FALSE(used[pc.nearest]);
        used[pc.nearest] = true;
    }
}

TEST_CASE("c_size calibration stops at the first passing candidate") {
    const auto data = generate(GaussianMixture{3000, 2, 2, 10.0, 1.0}, 3);
    const double candidates[] = {0.3, 0.001, 0.01};
    SuiteOptions suite;
    suite.random_box = 10;
    suite.d2_seeded = 5;
    const auto cal = calibrate_c_size(data, 2, 0.2, 0.1, candidates, 5, 1, 0.8, {}, suite);
    REQUIRE_FALSE(cal.steps.empty());
    CHECK(cal.steps.front().c_size == 0.001);
    for (std::size_t i = 1; i < cal.steps.size(); ++i) {
        CHECK(cal.steps[i].m > cal.steps[i - 1].m);
        CHECK(cal.steps[i - 1].success_rate < 0.8);
    }
    if (cal.c_size) {
        CHECK(cal.steps.back().success_rate >= 0.8);
        CHECK(*cal.c_size == cal.steps.back().c_size);
    }
}
