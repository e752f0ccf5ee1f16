#include "../unit/test_util.hpp"

#include "coreset/builder.hpp"
#include "coreset/harness.hpp"
#include "coreset/io.hpp"
#include "coreset/parallel.hpp"
#include "coreset/pipeline.hpp"
#include "coreset/seeding.hpp"
#include "coreset/sensitivity.hpp"
#include "coreset/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace coreset;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
    std::vector<std::string> notes;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream ss;
    ss.precision(precision);
    ss << v;
    return ss.str();
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double relative_error(double approx, double exact) { return std::abs(approx - exact) / exact; }

// 1. Total sensitivity identity.
Outcome criterion1() {
    Rng rng(101);
    std::size_t pass = 0;
    std::size_t corrected = 0;
    double worst = 0.0;
    Outcome out;
    for (std::size_t t = 0; t < 20; ++t) {
        const std::size_t n = uniform_int(rng, 100, 10'000);
        const std::size_t d = uniform_int(rng, 1, 10);
        const std::size_t k = uniform_int(rng, 1, 10);
        const auto data = testutil::random_dataset(n, d, 500 + t);
        const auto b = bicriteria(data, k, 0.1, derive_seed(t, stream::bicriteria));
        const auto p = sensitivity_bound(data, b);
        const double stated = 6.0 * p.alpha + 4.0;
        const double err = relative_error(p.total, stated);
        worst = std::max(worst, err);
        pass += err <= 1e-9 ? 1 : 0;
        corrected += relative_error(p.total, 6.0 * p.alpha + 4.0 * static_cast<double>(p.nonempty_clusters())) <= 1e-9
                         ? 1
                         : 0;
        if (err > 1e-9) {
            out.notes.push_back("n=" + std::to_string(n) + " d=" + std::to_string(d) + " k=" + std::to_string(k) +
                                ": total " + fmt(p.total, 10) + " vs 6a+4 = " + fmt(stated, 10) +
                                ", 6a+4*clusters = " +
                                fmt(6.0 * p.alpha + 4.0 * static_cast<double>(p.nonempty_clusters()), 10));
        }
    }
    out.pass = pass == 20;
    out.summary = std::to_string(pass) + "/20 datasets match 6a+4 (worst rel. err " + fmt(worst) + "); " +
                  std::to_string(corrected) + "/20 match 6a+4*(nonempty clusters)";
    return out;
}

// Values of |x - q|^2 / cost(X, q) along the line through the mean and x,
// q = mean + t * scale * u for t on a dense two-sided grid.
std::vector<Query> line_sweep(std::span<const double> mean, std::span<const double> u, double scale) {
    std::vector<double> ts;
    for (int i = -4000; i <= 4000; ++i) {
        const double mag = std::pow(10.0, -3.0 + 7.0 * std::abs(i) / 4000.0);
        ts.push_back(i < 0 ? -mag : mag);
    }
    ts.push_back(0.0);
    std::vector<Query> out;
    out.reserve(ts.size());
    for (double t : ts) {
        std::vector<double> c(mean.begin(), mean.end());
        for (std::size_t j = 0; j < c.size(); ++j) {
            c[j] += t * scale * u[j];
        }
        out.emplace_back(std::move(c), mean.size());
    }
    return out;
}

// 2. k = 1 closed form.
Outcome criterion2() {
    Rng rng(202);
    std::size_t total_ok = 0;
    std::size_t oracle_ok = 0;
    std::size_t bound_ok = 0;
    double worst_total = 0.0;
    double worst_oracle = 0.0;
    for (std::size_t t = 0; t < 20; ++t) {
        const std::size_t d = t < 10 ? 1 : uniform_int(rng, 2, 10);
        const std::size_t n = t < 10 ? uniform_int(rng, 100, 2000) : uniform_int(rng, 50, 120);
        const auto data = testutil::random_dataset(n, d, 900 + t);
        const auto sigma = exact_sensitivity_1means(data);

        std::vector<double> terms(n);
        for (std::size_t i = 0; i < n; ++i) {
            terms[i] = data.weight(i) / data.total_weight() * sigma[i];
        }
        const double total = compensated_sum(terms);
        worst_total = std::max(worst_total, std::abs(total - 2.0));
        total_ok += std::abs(total - 2.0) <= 1e-12 ? 1 : 0;

        std::vector<double> mean(d, 0.0);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                mean[j] += data.weight(i) / data.total_weight() * data.point(i)[j];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            var += data.weight(i) / data.total_weight() * squared_distance(data.point(i), mean);
        }
        const double scale = std::sqrt(var);

        std::vector<double> oracle(n, 0.0);
        if (d == 1) {
            const std::vector<double> u{1.0};
            const auto grid = line_sweep(mean, u, scale);
            oracle = grid_sensitivity_oracle(data, 1, grid);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> u(d);
                double len = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    u[j] = mean[j] - data.point(i)[j];
                    len += u[j] * u[j];
                }
                len = std::sqrt(len);
                if (len == 0.0) {
                    u.assign(d, 0.0);
                    u[0] = len = 1.0;
                }
                for (double& v : u) {
                    v /= len;
                }
                oracle[i] = grid_sensitivity_oracle(data, 1, line_sweep(mean, u, scale))[i];
            }
        }
        bool match = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = relative_error(oracle[i], sigma[i]);
            worst_oracle = std::max(worst_oracle, e);
            match = match && e <= 0.01;
        }
        oracle_ok += match ? 1 : 0;

        const auto p = sensitivity_bound(data, bicriteria(data, 1, 0.1, derive_seed(t, stream::bicriteria)));
        bool dominates = true;
        for (std::size_t i = 0; i < n; ++i) {
            dominates = dominates && p.s[i] >= sigma[i];
        }
        bound_ok += dominates ? 1 : 0;
    }
    Outcome out;
    out.pass = total_ok == 20 && oracle_ok == 20 && bound_ok == 20;
    out.summary = "sum = 2: " + std::to_string(total_ok) + "/20 (worst |dev| " + fmt(worst_total) +
                  "); grid oracle within 1%: " + std::to_string(oracle_ok) + "/20 (worst " + fmt(worst_oracle) +
                  "); s >= sigma: " + std::to_string(bound_ok) + "/20";
    return out;
}

double binomial_interval(std::size_t m, double p, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t c = lo; c <= hi && c <= m; ++c) {
        const double lg = std::lgamma(m + 1.0) - std::lgamma(c + 1.0) - std::lgamma(m - c + 1.0) +
                          static_cast<double>(c) * std::log(p) + static_cast<double>(m - c) * std::log1p(-p);
        acc += std::exp(lg);
    }
    return acc;
}

// 3. Uniform vs sensitivity sampling on the adversarial set.
Outcome criterion3() {
    const std::size_t n = 10'000;
    const std::size_t m = 100;
    const auto data = generate(Adversarial{n}, 0);
    const Query zero({0.0}, 1);
    const double full = total_cost(data, zero);

    std::vector<double> uniform_err(100);
    std::vector<double> sens_err(100);
    std::vector<char> contains(100);
    parallel_tasks(100, [&](std::size_t t) {
        const auto u = uniform_baseline(data, m, derive_seed(3, t));
        uniform_err[t] = relative_error(total_cost(u.data, zero), full);
        const auto c = build_kmeans_coreset(data, 1, 0.1, 0.1, m, derive_seed(3, t));
        sens_err[t] = relative_error(total_cost(c.data, zero), full);
        contains[t] = std::any_of(c.source_index.begin(), c.source_index.end(),
                                  [&](std::size_t i) { return data.point(i)[0] == 1.0; });
    });
    const auto high = std::count_if(uniform_err.begin(), uniform_err.end(), [](double e) { return e >= 0.99; });
    std::size_t sens_pass = 0;
    std::size_t hit = 0;
    for (std::size_t t = 0; t < 100; ++t) {
        hit += contains[t] ? 1 : 0;
        sens_pass += contains[t] && sens_err[t] <= 0.25 ? 1 : 0;
    }

    const auto r = build_kmeans_coreset_detailed(data, 1, 0.1, 0.1, m, 3);
    std::size_t outlier = 0;
    while (data.point(outlier)[0] != 1.0) {
        ++outlier;
    }
    const double q = r.q[outlier];
    const auto lo = static_cast<std::size_t>(std::ceil(0.75 * m * q));
    const auto hi = static_cast<std::size_t>(std::floor(1.25 * m * q));
    const double per_trial = binomial_interval(m, q, lo, hi);
    double at_least_99 = std::pow(per_trial, 100.0) + 100.0 * std::pow(per_trial, 99.0) * (1.0 - per_trial);

    Outcome out;
    out.pass = high >= 90 && sens_pass >= 99;
    out.summary = "uniform error >= 0.99 in " + std::to_string(high) + "/100 (need 90); sensitivity contains outlier " +
                  std::to_string(hit) + "/100, contains and error <= 0.25 in " + std::to_string(sens_pass) +
                  "/100 (need 99)";
    out.notes.push_back("q(outlier) = " + fmt(q, 6) + "; error <= 0.25 needs " + std::to_string(lo) + ".." +
                        std::to_string(hi) + " draws of the outlier, P = " + fmt(per_trial, 4) +
                        " per trial, P(>= 99/100) = " + fmt(at_least_99, 3));
    return out;
}

// 4. Unbiasedness of the importance weights.
Outcome criterion4() {
    const auto data = generate(GaussianMixture{10'000, 2, 3, 10.0, 1.0}, 4);
    const Query q = testutil::random_query(3, 2, 44);
    const double full = total_cost(data, q);
    const std::size_t rebuilds = 1000;
    std::vector<double> costs(rebuilds);
    parallel_tasks(rebuilds, [&](std::size_t t) {
        costs[t] = total_cost(build_kmeans_coreset(data, 3, 0.1, 0.1, 200, derive_seed(4, t)).data, q);
    });
    const double mean = compensated_sum(costs) / rebuilds;
    double ss = 0.0;
    for (double c : costs) {
        ss += (c - mean) * (c - mean);
    }
    const double sd = std::sqrt(ss / (rebuilds - 1));
    const double bound = 3.0 * sd / std::sqrt(static_cast<double>(rebuilds));
    Outcome out;
    out.pass = std::abs(mean - full) <= bound;
    out.summary = "|mean - cost| = " + fmt(std::abs(mean - full)) + " vs 3 SE = " + fmt(bound) +
                  " (cost " + fmt(full, 8) + ")";
    return out;
}

// 5. Solving on the coreset.
Outcome criterion5() {
    Outcome out;
    Rng rng(505);
    std::size_t exact_ok = 0;
    double worst_slack = -1e300;
    std::size_t small_eps = 0;
    std::size_t small_eps_ok = 0;
    double min_failing_eps = 1e300;
    for (std::size_t t = 0; t < 50; ++t) {
        const std::size_t n = uniform_int(rng, 6, 12);
        const std::size_t d = 1 + t % 2;
        const auto data = testutil::random_dataset(n, d, 5000 + t);
        const auto opt_x = ptas_exhaustive(data, 2);
        const auto c = build_kmeans_coreset(data, 2, 0.1, 0.1, n - 2, derive_seed(5, t));
        const auto opt_c = ptas_exhaustive(c.data, 2);
        SuiteOptions so;
        so.reference = opt_x.query;
        auto suite = default_query_suite(data, 2, derive_seed(55, t), so);
        suite.add(opt_c.query, QueryOrigin::User);
        const double eps = coreset_error(data, c.data, suite).max_error;
        const double lhs = total_cost(data, opt_c.query);
        const double rhs = (1.0 + 3.0 * eps) * opt_x.objective;
        worst_slack = std::max(worst_slack, lhs / rhs - 1.0);
        exact_ok += lhs <= rhs * (1.0 + 1e-12) ? 1 : 0;
        if (eps <= 1.0 / 3.0) {
            ++small_eps;
            small_eps_ok += lhs <= rhs * (1.0 + 1e-12) ? 1 : 0;
        } else {
            min_failing_eps = std::min(min_failing_eps, lhs <= rhs * (1.0 + 1e-12) ? 1e300 : eps);
        }
    }

    out.notes.push_back("(a) instances with measured error <= 1/3: " + std::to_string(small_eps_ok) + "/" +
                        std::to_string(small_eps) + " satisfy the bound; smallest measured error among failures: " +
                        (min_failing_eps < 1e300 ? fmt(min_failing_eps) : std::string("none")));

    std::size_t scale_ok = 0;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < 20; ++t) {
        const auto data = generate(GaussianMixture{50'000, 2, 5, 10.0, 1.0}, 5500 + t);
        CoresetSolveOptions opts;
        opts.m = 2000;
        opts.reference_restarts = 50;
        const auto r = solve_via_coreset(data, 5, 0.1, 0.1, derive_seed(5, 100 + t), opts);
        worst_ratio = std::max(worst_ratio, r.report.ratio);
        scale_ok += r.report.ratio <= 1.10 ? 1 : 0;
    }

    const auto cal_data = generate(GaussianMixture{10'000, 2, 3, 10.0, 1.0}, 5999);
    const std::vector<double> candidates{1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0};
    const auto cal = calibrate_c_size(cal_data, 3, 0.1, 0.1, candidates, 20, 59);
    std::string steps;
    for (const auto& s : cal.steps) {
        steps += " c=" + fmt(s.c_size) + "(m=" + std::to_string(s.m) + ", rate " + fmt(s.success_rate, 3) + ")";
    }
    out.notes.push_back("calibrated c_size for eps=0.1 on GMM(1e4,2,3): " +
                        (cal.c_size ? fmt(*cal.c_size) : std::string("none")) + ";" + steps);

    out.pass = exact_ok == 50 && scale_ok >= 18;
    out.summary = "(a) cost(X,Q*_C) <= (1+3e)cost(X,Q*_X) in " + std::to_string(exact_ok) +
                  "/50 (max lhs/rhs - 1 = " + fmt(worst_slack) + "); (b) ratio <= 1.10 in " +
                  std::to_string(scale_ok) + "/20 (need 18, worst " + fmt(worst_ratio) + ")";
    return out;
}

// 6. g-function range and mean.
Outcome criterion6() {
    std::size_t ok = 0;
    double lo = 1e300;
    double hi = -1e300;
    double worst_mean = 0.0;
    for (std::size_t t = 0; t < 10; ++t) {
        const std::size_t k = 1 + t % 4;
        const std::size_t d = 1 + t % 3;
        const bool weighted = t >= 5;
        const auto data = testutil::random_dataset(800, d, 600 + t, weighted);
        BuildOptions bo;
        bo.sensitivity.generalized_weights = weighted;
        const auto r = build_kmeans_coreset_detailed(data, k, 0.1, 0.1, 10, derive_seed(6, t), bo);
        const Query q = t % 2 ? testutil::random_query(k, d, 66 + t) : r.bicriteria.centers;
        const auto g = g_function(data, r.q, r.sensitivity.s, q);
        std::vector<double> terms(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            terms[i] = r.q[i] * g.g[i];
        }
        const double mean = compensated_sum(terms);
        const double dev = std::abs(mean - 1.0 / r.sensitivity.total);
        lo = std::min(lo, g.min);
        hi = std::max(hi, g.max);
        worst_mean = std::max(worst_mean, dev);
        ok += g.min >= -1e-9 && g.max <= 1.0 + 1e-9 && dev <= 1e-9 ? 1 : 0;
    }
    Outcome out;
    out.pass = ok == 10;
    out.summary = std::to_string(ok) + "/10 triples; g in [" + fmt(lo) + ", " + fmt(hi) +
                  "], max |sum q g - 1/S| = " + fmt(worst_mean);
    return out;
}

// 7. Streaming merge-reduce.
Outcome criterion7() {
    StreamOptions so;
    so.k = 5;
    so.leaf_block_size = 10'000;
    so.level_epsilon = 0.1;
    so.delta = 0.1;

    std::size_t ok = 0;
    double worst = 0.0;
    std::size_t depth = 0;
    for (std::size_t t = 0; t < 20; ++t) {
        const auto data = generate(UniformBox{100'000, 2}, 7000 + t);
        MergeReduceTree tree(2, so, derive_seed(7, t));
        for (std::size_t i = 0; i < data.size(); ++i) {
            tree.insert(data.point(i), data.weight(i));
        }
        const auto r = tree.finalize();
        const auto suite = default_query_suite(data, 5, derive_seed(77, t));
        const double err = coreset_error(data, r.coreset.data, suite).max_error;
        const double budget = std::pow(1.1, static_cast<double>(r.max_depth)) - 1.0;
        worst = std::max(worst, err / budget);
        depth = r.max_depth;
        ok += err <= budget ? 1 : 0;
    }

    bool identical = true;
    for (const std::size_t n : {std::size_t{10'000}, std::size_t{7'000}}) {
        const auto data = generate(UniformBox{n, 2}, 77'000 + n);
        MergeReduceTree tree(2, so, 17);
        for (std::size_t i = 0; i < data.size(); ++i) {
            tree.insert(data.point(i), data.weight(i));
        }
        const auto streamed = tree.finalize().coreset;
        const auto batch = build_kmeans_coreset(data, so.k, so.level_epsilon, so.delta, so.m, 17, tree.options().build);
        identical = identical && streamed.data == batch.data && streamed.source_index == batch.source_index;
    }

    Outcome out;
    out.pass = ok >= 19 && identical;
    out.summary = "error <= 1.1^depth - 1 in " + std::to_string(ok) + "/20 (need 19, depth " + std::to_string(depth) +
                  ", worst error/budget " + fmt(worst) + "); single block bit-identical to batch: " +
                  (identical ? "yes" : "no");
    return out;
}

// 8. Distributed union.
Outcome criterion8() {
    std::size_t ok = 0;
    bool bytes_ok = true;
    double worst = -1e300;
    for (std::size_t t = 0; t < 20; ++t) {
        const auto data = generate(GaussianMixture{20'000, 2, 4, 10.0, 1.0}, 8000 + t);
        const DistributedPlan plan{4, t % 2 ? PartitionRule::Contiguous : PartitionRule::RoundRobin,
                                   derive_seed(8, t)};
        const auto r = distributed_build(data, plan, 4, 0.1, 0.1);
        const auto suite = default_query_suite(data, 4, derive_seed(88, t));
        double part_max = 0.0;
        for (const auto& w : r.workers) {
            const auto part = data.subset(w.indices);
            part_max = std::max(part_max, coreset_error(part, w.coreset->data, suite).max_error);
            bytes_ok = bytes_ok && w.bytes_sent == 21 + 8 * w.coreset->data.size() * (data.dim() + 1);
        }
        const double merged = coreset_error(data, r.coreset.data, suite).max_error;
        worst = std::max(worst, merged - part_max);
        ok += merged <= part_max + 0.01 ? 1 : 0;
    }
    const auto tiny = testutil::line({0.0, 1.0, 5.0});
    const auto sparse = distributed_build(tiny, DistributedPlan{4, PartitionRule::RoundRobin, 8}, 1, 0.1, 0.1, 3);
    const auto bytes = sparse.bytes_per_worker();
    bytes_ok = bytes_ok && bytes.size() == 4 && bytes[3] == 21 && !sparse.workers[3].coreset;
    for (std::size_t w = 0; w < 3; ++w) {
        bytes_ok = bytes_ok && bytes[w] == 21 + 8 * sparse.workers[w].coreset->data.size() * 2;
    }

    Outcome out;
    out.pass = ok >= 19 && bytes_ok;
    out.summary = "merged <= max(part) + 0.01 in " + std::to_string(ok) + "/20 (need 19, max merged - part = " +
                  fmt(worst) + "); bytes_per_worker = 21 + 8*rows*(d+1): " + (bytes_ok ? "yes" : "no");
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 9. CLI determinism across reruns and thread counts.
Outcome criterion9() {
    const fs::path root = fs::temp_directory_path() / ("coreset_accept_" + std::to_string(getpid()));
    fs::create_directories(root);
    const std::string cli = CORESET_CLI;
    auto sh = [&](const std::string& cmd) {
        const int status = std::system((cmd + " 2>/dev/null").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    const std::string x = (root / "x.csv").string();
    const std::string xs = (root / "xs.csv").string();
    Outcome out;
    if (sh(cli + " --seed 9 gen --kind gmm --n 20000 --d 3 --k 4 --out " + x) != 0 ||
        sh(cli + " --seed 9 gen --kind uniform --n 2000 --d 2 --out " + xs) != 0) {
        out.summary = "could not generate input";
        return out;
    }

    struct Pipeline {
        std::string name;
        std::string args;   // {dir} is replaced by the run directory
        std::vector<std::string> artifacts;
    };
    const std::vector<Pipeline> pipelines{
        {"gen", "gen --kind gmm --n 5000 --d 2 --k 3 --out {dir}/g.csv", {"g.csv", "g.csv.json"}},
        {"build", "build --input " + x + " --k 4 --m 500 --out {dir}/c.bin --report {dir}/r.json",
         {"c.bin", "c.bin.json", "r.json"}},
        {"build-uniform", "build --input " + x + " --distribution uniform --m 500 --out {dir}/u.csv",
         {"u.csv", "u.csv.json"}},
        {"sensitivity", "sensitivity --input " + x + " --k 4 --out {dir}/s.csv --summary {dir}/s.json",
         {"s.csv", "s.json"}},
        {"solve", "solve --input " + x + " --k 4 --via-coreset --m 500 --out {dir}/v.json --centers-out {dir}/v.csv",
         {"v.json", "v.csv"}},
        {"check", "check --full " + x + " --coreset " + x + " --k 4 --out {dir}/k.json", {"k.json"}},
        {"stream", "stream --input " + x + " --k 4 --block-size 3000 --m 400 --out {dir}/t.csv",
         {"t.csv", "t.csv.json"}},
        {"distribute", "distribute --input " + x + " --workers 4 --k 4 --m 300 --out {dir}/d.csv", {"d.csv", "d.csv.json"}},
        {"bench", "bench --input " + xs + " --k 2 --m 100 --trials 10 --out {dir}/b.json --csv {dir}/b.csv",
         {"b.json", "b.csv"}},
    };

    std::size_t ok = 0;
    for (const auto& p : pipelines) {
        std::vector<std::vector<std::string>> runs;
        bool ran = true;
        int run = 0;
        for (const unsigned threads : {1u, 1u, 8u, 8u}) {
            const fs::path dir = root / (p.name + std::to_string(run++));
            fs::create_directories(dir);
            std::string args = p.args;
            for (std::size_t pos; (pos = args.find("{dir}")) != std::string::npos;) {
                args.replace(pos, 5, dir.string());
            }
            ran = ran && sh(cli + " --seed 99 --threads " + std::to_string(threads) + " " + args) == 0;
            std::vector<std::string> files;
            for (const auto& a : p.artifacts) {
                files.push_back(slurp(dir / a));
            }
            runs.push_back(std::move(files));
        }
        const bool same = ran && std::all_of(runs.begin(), runs.end(), [&](const auto& r) {
            return r == runs.front() && std::none_of(r.begin(), r.end(), [](const auto& s) { return s.empty(); });
        });
        ok += same ? 1 : 0;
        if (!same) {
            out.notes.push_back(p.name + ": artifacts differ or run failed");
        }
    }
    fs::remove_all(root);
    out.pass = ok == pipelines.size();
    out.summary = std::to_string(ok) + "/" + std::to_string(pipelines.size()) +
                  " pipelines byte-identical over 2 runs x {1, 8} threads";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "total sensitivity identity", 5.0, criterion1},
        {2, "k=1 closed-form sensitivity", 30.0, criterion2},
        {3, "uniform vs sensitivity on the outlier set", 60.0, criterion3},
        {4, "unbiased importance weights", 120.0, criterion4},
        {5, "solving on the coreset", 300.0, criterion5},
        {6, "g-function identities", 10.0, criterion6},
        {7, "streaming composition", 180.0, criterion7},
        {8, "distributed union", 120.0, criterion8},
        {9, "CLI determinism", 60.0, criterion9},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            only.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: acceptance [--only N]...\n";
            return 2;
        }
    }

    bool all = true;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.summary = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.pass && in_time;
        all = all && pass;
        std::cout << (pass ? "PASS" : "FAIL") << " C" << c.id << " " << c.name << ": " << o.summary << " ["
                  << fmt(secs, 3) << " s, limit " << c.limit_s << " s" << (in_time ? "" : ", TOO SLOW") << "]\n";
        for (const auto& n : o.notes) {
            std::cout << "    " << n << "\n";
        }
        std::cout.flush();
    }
    return all ? 0 : 1;
}
