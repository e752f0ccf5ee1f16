#include "report.hpp"

#include "coreset/builder.hpp"
#include "coreset/harness.hpp"
#include "coreset/io.hpp"
#include "coreset/parallel.hpp"
#include "coreset/pipeline.hpp"
#include "coreset/sensitivity.hpp"
#include "coreset/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace coreset;
using cli::json;
namespace fs = std::filesystem;

namespace {

constexpr int exit_validation = 1;
constexpr int exit_usage = 2;
constexpr int exit_budget = 3;

struct Globals {
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string log_level = "warn";
    std::optional<std::string> format;

    std::uint64_t resolved_seed() const {
        if (seed) {
            return *seed;
        }
        if (const char* env = std::getenv("CORESET_SEED")) {
            std::uint64_t v = 0;
            const std::string_view s(env);
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                throw cli::ValidationError("CORESET_SEED is not an unsigned integer: " + std::string(s));
            }
            return v;
        }
        return 0;
    }
};

struct SamplingFlags {
    std::size_t k = 3;
    double epsilon = 0.1;
    double delta = 0.1;
    std::optional<std::size_t> m;
    double c_size = 1.0;
    double bicriteria_runs = 3.0;
    bool alg2_constants = false;
    bool generalized_weights = false;
    bool no_merge = false;

    void add_to(CLI::App* app, bool with_epsilon = true) {
        app->add_option("--k", k, "Number of centers")->check(CLI::PositiveNumber);
        if (with_epsilon) {
            app->add_option("--epsilon", epsilon, "Target relative error")->check(CLI::Range(0.0, 1.0));
        }
        app->add_option("--delta", delta, "Failure probability")->check(CLI::Range(0.0, 1.0));
        if (with_epsilon) {
            app->add_option("--m", m, "Number of draws (default: recommended size)")->check(CLI::PositiveNumber);
            app->add_option("--c-size", c_size, "Leading constant of the recommended size")
                ->check(CLI::PositiveNumber);
            app->add_flag("--no-merge", no_merge, "Keep repeated draws as separate rows");
        }
        app->add_option("--bicriteria-runs", bicriteria_runs,
                        "Seeding runs factor: runs = max(1, ceil(factor * ln(1/delta)))")
            ->check(CLI::PositiveNumber);
        app->add_flag("--alg2-constants", alg2_constants, "Use the alternative coefficient set");
        app->add_flag("--generalized-weights", generalized_weights, "Accept non-uniform input weights");
    }

    BuildOptions build_options() const {
        BuildOptions o;
        o.c_size = c_size;
        o.bicriteria.run_factor = bicriteria_runs;
        o.sensitivity.constants = alg2_constants ? SensitivityConstants::Algorithm2 : SensitivityConstants::Lemma;
        o.sensitivity.generalized_weights = generalized_weights;
        o.merge_duplicates = !no_merge;
        return o;
    }

    json config() const {
        json j{{"k", k},
               {"epsilon", epsilon},
               {"delta", delta},
               {"c_size", c_size},
               {"bicriteria_runs", bicriteria_runs},
               {"alg2_constants", alg2_constants},
               {"generalized_weights", generalized_weights},
               {"merge_duplicates", !no_merge}};
        j["m"] = m ? json(*m) : json(nullptr);
        return j;
    }
};

json query_json(const Query& q) {
    json centers = json::array();
    for (std::size_t j = 0; j < q.k(); ++j) {
        const auto c = q.center(j);
        centers.push_back(std::vector<double>(c.begin(), c.end()));
    }
    return centers;
}

void write_query_csv(const fs::path& path, const Query& q) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (std::size_t j = 0; j < q.dim(); ++j) {
        out << (j ? "," : "") << 'x' << j;
    }
    out << '\n';
    for (std::size_t c = 0; c < q.k(); ++c) {
        const auto p = q.center(c);
        for (std::size_t j = 0; j < p.size(); ++j) {
            out << (j ? "," : "") << format_double(p[j]);
        }
        out << '\n';
    }
}

// ---- gen ----------------------------------------------------------------

struct GenOpts {
    std::string kind = "uniform";
    std::size_t n = 1000;
    std::size_t d = 2;
    std::size_t k = 3;
    double separation = 10.0;
    double sigma = 1.0;
    std::optional<fs::path> out;
    std::optional<fs::path> centers_out;
};

int run_gen(const Globals& g, const GenOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    json config{{"kind", o.kind}, {"n", o.n}};
    WeightedDataset data = [&] {
        if (o.kind == "adversarial") {
            return generate(Adversarial{o.n}, seed);
        }
        if (o.kind == "uniform") {
            config["d"] = o.d;
            return generate(UniformBox{o.n, o.d}, seed);
        }
        config.update({{"d", o.d}, {"k", o.k}, {"separation", o.separation}, {"sigma", o.sigma}});
        auto mix = generate_mixture(GaussianMixture{o.n, o.d, o.k, o.separation, o.sigma}, seed);
        if (o.centers_out) {
            write_query_csv(*o.centers_out, mix.planted);
        }
        return std::move(mix.data);
    }();
    json report = cli::make_report("gen", seed, config);
    report["result"] = cli::dataset_summary(data);
    cli::write_dataset(data, o.out, cli::resolve_format(g.format, o.out), report);
    return 0;
}

// ---- build --------------------------------------------------------------

struct BuildOpts {
    fs::path input;
    SamplingFlags sampling;
    std::string distribution = "sensitivity";
    std::optional<fs::path> out;
    std::optional<fs::path> report;
};

int run_build(const Globals& g, const BuildOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    const auto data = cli::load_dataset(o.input);
    json config = o.sampling.config();
    config["distribution"] = o.distribution;
    json report = cli::make_report("build", seed, config);
    report["input"] = cli::dataset_summary(data);

    std::optional<WeightedDataset> result;
    json res;
    if (o.distribution == "identity") {
        result = data;
        res["distribution"] = "identity";
    } else if (o.distribution == "uniform") {
        const std::size_t m =
            o.sampling.m ? *o.sampling.m
                         : recommended_m({data.dim(), o.sampling.k, o.sampling.epsilon, o.sampling.delta / 2.0,
                                          o.sampling.c_size, std::nullopt});
        auto c = uniform_baseline(data, m, seed, !o.sampling.no_merge);
        res["provenance"] = cli::provenance_json(c.provenance);
        result = std::move(c.data);
    } else {
        auto r = build_kmeans_coreset_detailed(data, o.sampling.k, o.sampling.epsilon, o.sampling.delta,
                                               o.sampling.m, seed, o.sampling.build_options());
        res["provenance"] = cli::provenance_json(r.coreset.provenance);
        res["bicriteria"] = {{"alpha", r.bicriteria.alpha},
                             {"beta", r.bicriteria.beta},
                             {"seed_cost", r.bicriteria.seed_cost},
                             {"runs_taken", r.bicriteria.runs_taken},
                             {"best_run", r.bicriteria.best_run},
                             {"padded", r.bicriteria.padded}};
        res["total_sensitivity"] = r.sensitivity.total;
        res["expected_total"] = r.sensitivity.expected_total();
        result = std::move(r.coreset.data);
    }
    res["coreset"] = cli::dataset_summary(*result);
    report["result"] = res;
    cli::write_dataset(*result, o.out, cli::resolve_format(g.format, o.out), report);
    if (o.report) {
        cli::write_json(*o.report, report);
    }
    cli::log(cli::LogLevel::Info, "coreset with " + std::to_string(result->size()) + " rows");
    return 0;
}

// ---- sensitivity --------------------------------------------------------

struct SensitivityOpts {
    fs::path input;
    SamplingFlags sampling;
    std::optional<fs::path> out;
    fs::path summary = "-";
};

int run_sensitivity(const Globals& g, const SensitivityOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    const auto data = cli::load_dataset(o.input);
    const auto opts = o.sampling.build_options();
    const auto b = bicriteria(data, o.sampling.k, o.sampling.delta / 2.0, derive_seed(seed, stream::bicriteria),
                              opts.bicriteria);
    const auto p = sensitivity_bound(data, b, opts.sensitivity);

    json config = o.sampling.config();
    for (const char* unused : {"epsilon", "m", "c_size", "merge_duplicates"}) {
        config.erase(unused);
    }
    json report = cli::make_report("sensitivity", seed, config);
    report["input"] = cli::dataset_summary(data);
    report["result"] = {{"alpha", p.alpha},
                        {"beta", p.beta},
                        {"total", p.total},
                        {"expected_total", p.expected_total()},
                        {"mean_seed_cost", p.mean_seed_cost},
                        {"cluster_sizes", p.cluster_sizes},
                        {"generalized", p.generalized}};
    if (o.out) {
        std::ofstream csv(*o.out);
        if (!csv) {
            throw std::runtime_error("cannot open " + o.out->string() + " for writing");
        }
        csv << "index,s,cluster\n";
        for (std::size_t i = 0; i < data.size(); ++i) {
            csv << i << ',' << format_double(p.s[i]) << ',' << p.cluster_of[i] << '\n';
        }
        auto sidecar = *o.out;
        sidecar += ".json";
        cli::write_json(sidecar, report);
    }
    cli::write_json(o.summary, report);
    return 0;
}

// ---- solve --------------------------------------------------------------

struct SolveOpts {
    fs::path input;
    SamplingFlags sampling;
    std::string method = "lloyd";
    std::size_t restarts = 10;
    std::size_t reference_restarts = 50;
    bool via_coreset = false;
    fs::path out = "-";
    std::optional<fs::path> centers_out;
};

int run_solve(const Globals& g, const SolveOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    const auto data = cli::load_dataset(o.input);
    json config = o.sampling.config();
    config.update({{"method", o.method},
                   {"restarts", o.restarts},
                   {"reference_restarts", o.reference_restarts},
                   {"via_coreset", o.via_coreset}});
    json report = cli::make_report("solve", seed, config);
    report["input"] = cli::dataset_summary(data);

    CoresetSolveOptions opts;
    opts.method = o.method == "ptas" ? SolveMethod::Ptas : SolveMethod::Lloyd;
    opts.restarts = o.restarts;
    opts.reference_restarts = o.reference_restarts;
    opts.m = o.sampling.m;
    opts.build = o.sampling.build_options();

    Query centers({0.0}, 1);
    if (o.via_coreset) {
        const auto r = solve_via_coreset(data, o.sampling.k, o.sampling.epsilon, o.sampling.delta, seed, opts);
        report["result"] = {{"objective_on_full", r.report.objective_on_full},
                            {"objective_on_coreset", r.report.objective_on_coreset},
                            {"reference_objective", r.report.reference_objective},
                            {"reference", r.report.reference_exact ? "exact" : "heuristic"},
                            {"ratio", r.report.ratio},
                            {"iterations", r.report.iterations},
                            {"coreset", cli::dataset_summary(r.coreset.data)},
                            {"centers", query_json(r.report.coreset_query)}};
        centers = r.report.coreset_query;
    } else {
        const Solution s = opts.method == SolveMethod::Ptas
                               ? ptas_exhaustive(data, o.sampling.k, opts.ptas)
                               : lloyd_restarts(data, o.sampling.k, o.restarts, derive_seed(seed, stream::solve));
        report["result"] = {{"objective", s.objective},
                            {"iterations", s.iterations},
                            {"converged", s.converged},
                            {"centers", query_json(s.query)}};
        centers = s.query;
    }
    if (o.centers_out) {
        write_query_csv(*o.centers_out, centers);
    }
    cli::write_json(o.out, report);
    return 0;
}

// ---- check --------------------------------------------------------------

struct CheckOpts {
    fs::path full;
    fs::path coreset;
    std::string suite = "default";
    std::optional<std::size_t> k;
    std::optional<double> epsilon_budget;
    std::size_t random_box = 50;
    std::size_t d2_seeded = 20;
    std::size_t perturbations = 10;
    std::size_t reference_restarts = 10;
    fs::path out = "-";
};

QuerySuite load_suite(const fs::path& path, std::size_t dim, std::optional<std::size_t> k) {
    std::ifstream in(path);
    if (!in) {
        throw cli::ValidationError("cannot open query suite " + path.string());
    }
    CsvRowReader reader(in);
    if (reader.has_weights() || reader.dim() % dim != 0) {
        throw cli::ValidationError("query rows must hold k * d coordinates");
    }
    const std::size_t kk = reader.dim() / dim;
    if (k && *k != kk) {
        throw cli::ValidationError("query rows hold " + std::to_string(kk) + " centers, --k is " +
                                   std::to_string(*k));
    }
    QuerySuite suite;
    std::vector<double> row;
    std::optional<double> w;
    while (reader.next(row, w)) {
        suite.add(Query(row, dim), QueryOrigin::User);
    }
    return suite;
}

json error_json(const QueryError& e) {
    return {{"index", e.index},
            {"origin", std::string(to_string(e.origin))},
            {"full_cost", e.full_cost},
            {"coreset_cost", e.coreset_cost},
            {"error", e.error}};
}

int run_check(const Globals& g, const CheckOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    const auto full = cli::load_dataset(o.full);
    const auto cs = cli::load_dataset(o.coreset);
    if (full.dim() != cs.dim()) {
        throw cli::ValidationError("full data and coreset have different dimensions");
    }
    QuerySuite suite;
    json config{{"suite", o.suite == "default" ? "default" : "file"}};
    if (o.suite == "default") {
        if (!o.k) {
            throw cli::ValidationError("--k is required with the default suite");
        }
        SuiteOptions so;
        so.random_box = o.random_box;
        so.d2_seeded = o.d2_seeded;
        so.perturbations = o.perturbations;
        so.reference_restarts = o.reference_restarts;
        suite = default_query_suite(full, *o.k, seed, so);
        config.update({{"k", *o.k},
                       {"random_box", o.random_box},
                       {"d2_seeded", o.d2_seeded},
                       {"perturbations", o.perturbations},
                       {"reference_restarts", o.reference_restarts}});
    } else {
        suite = load_suite(o.suite, full.dim(), o.k);
    }
    config["epsilon_budget"] = o.epsilon_budget ? json(*o.epsilon_budget) : json(nullptr);

    const auto r = coreset_error(full, cs, suite);
    json report = cli::make_report("check", seed, config);
    json errors = json::array();
    for (const auto& e : r.errors) {
        errors.push_back(error_json(e));
    }
    json zero = json::array();
    for (const auto& e : r.zero_cost) {
        zero.push_back(error_json(e));
    }
    const bool within = !o.epsilon_budget || r.max_error <= *o.epsilon_budget;
    report["result"] = {{"max_error", r.max_error},
                        {"worst", r.worst},
                        {"worst_origin", std::string(to_string(suite.origins[r.worst]))},
                        {"queries", suite.size()},
                        {"errors", errors},
                        {"zero_cost", zero},
                        {"within_budget", within}};
    cli::write_json(o.out, report);
    if (!within) {
        cli::log(cli::LogLevel::Error, "suite error " + format_double(r.max_error) + " exceeds budget " +
                                           format_double(*o.epsilon_budget));
        return exit_budget;
    }
    return 0;
}

// ---- stream -------------------------------------------------------------

struct StreamOpts {
    fs::path input = "-";
    SamplingFlags sampling;
    std::size_t block_size = 10000;
    double level_epsilon = 0.1;
    std::optional<double> final_epsilon;
    std::optional<fs::path> out;
    std::optional<fs::path> report;
};

int run_stream(const Globals& g, const StreamOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    std::ifstream file;
    if (o.input != "-") {
        file.open(o.input);
        if (!file) {
            throw cli::ValidationError("cannot open " + o.input.string());
        }
    }
    std::istream& in = o.input == "-" ? std::cin : file;
    CsvRowReader reader(in);

    StreamOptions so;
    so.k = o.sampling.k;
    so.leaf_block_size = o.block_size;
    so.level_epsilon = o.level_epsilon;
    so.delta = o.sampling.delta;
    so.m = o.sampling.m;
    so.build = o.sampling.build_options();
    MergeReduceTree tree(reader.dim(), so, seed);
    std::vector<double> row;
    std::optional<double> w;
    while (reader.next(row, w)) {
        tree.insert(row, w.value_or(1.0));
    }
    const auto result = tree.finalize(o.final_epsilon);

    json config = o.sampling.config();
    config.erase("epsilon");
    config.update({{"block_size", o.block_size}, {"level_epsilon", o.level_epsilon}});
    config["final_epsilon"] = o.final_epsilon ? json(*o.final_epsilon) : json(nullptr);
    json report = cli::make_report("stream", seed, config);
    report["result"] = {{"points_seen", tree.points_seen()},
                        {"blocks", tree.blocks_built()},
                        {"compressions", tree.compressions()},
                        {"occupied_levels", tree.occupied_levels()},
                        {"max_depth", result.max_depth},
                        {"error_budget", result.error_budget},
                        {"coreset", cli::dataset_summary(result.coreset.data)}};
    cli::write_dataset(result.coreset.data, o.out, cli::resolve_format(g.format, o.out), report);
    if (o.report) {
        cli::write_json(*o.report, report);
    }
    return 0;
}

// ---- distribute ---------------------------------------------------------

struct DistributeOpts {
    fs::path input;
    SamplingFlags sampling;
    std::size_t workers = 4;
    std::string partition = "rr";
    std::optional<fs::path> out;
    std::optional<fs::path> report;
    std::optional<fs::path> timing;
};

int run_distribute(const Globals& g, const DistributeOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    const auto data = cli::load_dataset(o.input);
    const DistributedPlan plan{o.workers, o.partition == "contig" ? PartitionRule::Contiguous : PartitionRule::RoundRobin,
                               seed};
    const auto r = distributed_build(data, plan, o.sampling.k, o.sampling.epsilon, o.sampling.delta, o.sampling.m,
                                     o.sampling.build_options());

    json config = o.sampling.config();
    config.update({{"workers", o.workers}, {"partition", o.partition}});
    json report = cli::make_report("distribute", seed, config);
    json workers = json::array();
    json timing = json::array();
    std::size_t total = 0;
    for (std::size_t w = 0; w < r.workers.size(); ++w) {
        const auto& wr = r.workers[w];
        workers.push_back({{"worker", w},
                           {"points", wr.indices.size()},
                           {"coreset_rows", wr.coreset ? wr.coreset->data.size() : 0},
                           {"bytes_sent", wr.bytes_sent},
                           {"seed", wr.seed},
                           {"empty", !wr.coreset}});
        timing.push_back({{"worker", w}, {"wall_ms", wr.wall_ms}});
        total += wr.bytes_sent;
        if (!wr.coreset) {
            cli::log(cli::LogLevel::Warn, "worker " + std::to_string(w) + " received no points");
        }
    }
    report["input"] = cli::dataset_summary(data);
    report["result"] = {{"workers", workers},
                        {"bytes_per_worker", r.bytes_per_worker()},
                        {"bytes_total", total},
                        {"coreset", cli::dataset_summary(r.coreset.data)}};
    cli::write_dataset(r.coreset.data, o.out, cli::resolve_format(g.format, o.out), report);
    if (o.report) {
        cli::write_json(*o.report, report);
    }
    if (o.timing) {
        cli::write_json(*o.timing, json{{"workers", timing}});
    }
    return 0;
}

// ---- bench --------------------------------------------------------------

struct BenchOpts {
    fs::path input;
    SamplingFlags sampling;
    std::string compare = "sensitivity,uniform";
    std::size_t trials = 100;
    bool calibrate = false;
    std::vector<double> candidates{0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0};
    double target_rate = 0.95;
    std::size_t random_box = 50;
    std::size_t d2_seeded = 20;
    std::size_t perturbations = 10;
    fs::path out = "-";
    std::optional<fs::path> csv;
};

json error_stats(std::vector<double> e, double epsilon) {
    std::sort(e.begin(), e.end());
    double sum = 0.0;
    std::size_t high = 0;
    std::size_t ok = 0;
    for (double v : e) {
        sum += v;
        high += v >= 0.99 ? 1 : 0;
        ok += v <= epsilon ? 1 : 0;
    }
    const double n = static_cast<double>(e.size());
    const double median = e.size() % 2 ? e[e.size() / 2] : 0.5 * (e[e.size() / 2 - 1] + e[e.size() / 2]);
    return {{"mean", sum / n},
            {"median", median},
            {"min", e.front()},
            {"max", e.back()},
            {"fraction_at_least_0.99", static_cast<double>(high) / n},
            {"fraction_within_epsilon", static_cast<double>(ok) / n}};
}

int run_bench(const Globals& g, const BenchOpts& o) {
    const std::uint64_t seed = g.resolved_seed();
    const auto data = cli::load_dataset(o.input);
    std::vector<std::string> methods;
    {
        std::stringstream ss(o.compare);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item != "sensitivity" && item != "uniform") {
                throw cli::ValidationError("unknown method in --compare: " + item);
            }
            methods.push_back(item);
        }
    }
    if (o.trials == 0) {
        throw cli::ValidationError("--trials must be positive");
    }
    SuiteOptions so;
    so.random_box = o.random_box;
    so.d2_seeded = o.d2_seeded;
    so.perturbations = o.perturbations;
    const auto suite = default_query_suite(data, o.sampling.k, seed, so);
    const auto build = o.sampling.build_options();
    const std::size_t m =
        o.sampling.m ? *o.sampling.m
                     : recommended_m({data.dim(), o.sampling.k, o.sampling.epsilon, o.sampling.delta / 2.0,
                                      o.sampling.c_size, std::nullopt});

    json config = o.sampling.config();
    config.update({{"compare", methods},
                   {"trials", o.trials},
                   {"random_box", o.random_box},
                   {"d2_seeded", o.d2_seeded},
                   {"perturbations", o.perturbations},
                   {"calibrate", o.calibrate}});
    if (o.calibrate) {
        config.update({{"candidates", o.candidates}, {"target_rate", o.target_rate}});
    }
    json report = cli::make_report("bench", seed, config);
    report["input"] = cli::dataset_summary(data);

    json methods_json = json::object();
    std::ostringstream rows;
    rows << "method,trial,max_error,coreset_rows\n";
    for (const auto& method : methods) {
        std::vector<double> errors(o.trials);
        std::vector<std::size_t> sizes(o.trials);
        parallel_tasks(o.trials, [&](std::size_t t) {
            const std::uint64_t s = derive_seed(seed, t);
            const Coreset c = method == "uniform"
                                  ? uniform_baseline(data, m, s, build.merge_duplicates)
                                  : build_kmeans_coreset(data, o.sampling.k, o.sampling.epsilon, o.sampling.delta, m,
                                                         s, build);
            errors[t] = coreset_error(data, c.data, suite).max_error;
            sizes[t] = c.data.size();
        });
        for (std::size_t t = 0; t < o.trials; ++t) {
            rows << method << ',' << t << ',' << format_double(errors[t]) << ',' << sizes[t] << '\n';
        }
        json stats = error_stats(errors, o.sampling.epsilon);
        stats["errors"] = errors;
        methods_json[method] = stats;
    }

    const auto detail = build_kmeans_coreset_detailed(data, o.sampling.k, o.sampling.epsilon, o.sampling.delta, m,
                                                      seed, build);
    json result{{"m", m},
                {"suite_size", suite.size()},
                {"methods", methods_json},
                {"total_sensitivity", detail.sensitivity.total},
                {"hoeffding_m", hoeffding_m(detail.sensitivity.total, o.sampling.epsilon, o.sampling.delta)},
                {"recommended_m", recommended_m({data.dim(), o.sampling.k, o.sampling.epsilon,
                                                 o.sampling.delta / 2.0, o.sampling.c_size, std::nullopt})}};
    if (o.calibrate) {
        const auto cal = calibrate_c_size(data, o.sampling.k, o.sampling.epsilon, o.sampling.delta, o.candidates,
                                          o.trials, seed, o.target_rate, build, so);
        json steps = json::array();
        for (const auto& st : cal.steps) {
            steps.push_back({{"c_size", st.c_size}, {"m", st.m}, {"success_rate", st.success_rate},
                             {"max_error", *std::max_element(st.errors.begin(), st.errors.end())}});
        }
        result["calibration"] = {{"steps", steps},
                                 {"c_size", cal.c_size ? json(*cal.c_size) : json(nullptr)}};
    }
    report["result"] = result;
    cli::write_json(o.out, report);
    if (o.csv) {
        std::ofstream f(*o.csv);
        if (!f) {
            throw std::runtime_error("cannot open " + o.csv->string() + " for writing");
        }
        f << rows.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coreset construction, solving and verification for k-means"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Random seed (falls back to CORESET_SEED, then 0)");
    app.add_option("--threads", g.threads, "Worker threads (0 = available parallelism)");
    app.add_option("--log-level", g.log_level, "Log verbosity")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
    app.add_option("--format", g.format, "Format for data outputs")->check(CLI::IsMember({"csv", "bin", "json"}));

    std::function<int()> action;

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen_cmd->add_option("--kind", gen.kind, "adversarial, gmm or uniform")
        ->check(CLI::IsMember({"adversarial", "gmm", "uniform"}));
    gen_cmd->add_option("--n", gen.n, "Number of points")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--d", gen.d, "Dimension")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--k", gen.k, "Mixture components")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--separation", gen.separation, "Minimum distance between mixture centers");
    gen_cmd->add_option("--sigma", gen.sigma, "Mixture standard deviation");
    gen_cmd->add_option("--out", gen.out, "Output file (stdout if omitted)");
    gen_cmd->add_option("--centers-out", gen.centers_out, "Write planted mixture centers as CSV");
    gen_cmd->callback([&] { action = [&] { return run_gen(g, gen); }; });

    BuildOpts build;
    auto* build_cmd = app.add_subcommand("build", "Build a coreset");
    build_cmd->add_option("--input", build.input, "Input dataset (CSV or CSK1)")->required();
    build.sampling.add_to(build_cmd);
    build_cmd->add_option("--distribution", build.distribution, "sensitivity, uniform or identity")
        ->check(CLI::IsMember({"sensitivity", "uniform", "identity"}));
    build_cmd->add_option("--out", build.out, "Coreset output (stdout if omitted)");
    build_cmd->add_option("--report", build.report, "Also write the JSON report here");
    build_cmd->callback([&] { action = [&] { return run_build(g, build); }; });

    SensitivityOpts sens;
    auto* sens_cmd = app.add_subcommand("sensitivity", "Per-point sensitivity bounds");
    sens_cmd->add_option("--input", sens.input, "Input dataset")->required();
    sens.sampling.add_to(sens_cmd, false);
    sens_cmd->add_option("--out", sens.out, "Per-point CSV (index,s,cluster)");
    sens_cmd->add_option("--summary", sens.summary, "JSON summary path (- for stdout)");
    sens_cmd->callback([&] { action = [&] { return run_sensitivity(g, sens); }; });

    SolveOpts solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve k-means, optionally through a coreset");
    solve_cmd->add_option("--input", solve.input, "Input dataset")->required();
    solve.sampling.add_to(solve_cmd);
    solve_cmd->add_option("--method", solve.method, "lloyd or ptas")->check(CLI::IsMember({"lloyd", "ptas"}));
    solve_cmd->add_option("--restarts", solve.restarts, "Lloyd restarts")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--reference-restarts", solve.reference_restarts, "Lloyd restarts for the reference")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_flag("--via-coreset", solve.via_coreset, "Solve on a coreset and compare on the full data");
    solve_cmd->add_option("--out", solve.out, "JSON report path (- for stdout)");
    solve_cmd->add_option("--centers-out", solve.centers_out, "Write the centers as CSV");
    solve_cmd->callback([&] { action = [&] { return run_solve(g, solve); }; });

    CheckOpts check;
    auto* check_cmd = app.add_subcommand("check", "Measure coreset error over a query suite");
    check_cmd->add_option("--full", check.full, "Full dataset")->required();
    check_cmd->add_option("--coreset", check.coreset, "Coreset")->required();
    check_cmd->add_option("--suite", check.suite, "default, or a CSV file with one query (k*d values) per row");
    check_cmd->add_option("--k", check.k, "Centers per query")->check(CLI::PositiveNumber);
    check_cmd->add_option("--epsilon-budget", check.epsilon_budget, "Exit with 3 if the error exceeds this");
    check_cmd->add_option("--random-box", check.random_box, "Random box queries");
    check_cmd->add_option("--d2-seeded", check.d2_seeded, "D^2-seeded queries");
    check_cmd->add_option("--perturbations", check.perturbations, "Perturbed reference queries");
    check_cmd->add_option("--reference-restarts", check.reference_restarts, "Lloyd restarts for the reference")
        ->check(CLI::PositiveNumber);
    check_cmd->add_option("--out", check.out, "JSON report path (- for stdout)");
    check_cmd->callback([&] { action = [&] { return run_check(g, check); }; });

    StreamOpts str;
    auto* stream_cmd = app.add_subcommand("stream", "Merge-reduce coreset over a CSV stream");
    stream_cmd->add_option("--input", str.input, "CSV input (- for stdin)");
    str.sampling.add_to(stream_cmd);
    stream_cmd->add_option("--block-size", str.block_size, "Points per leaf block")->check(CLI::PositiveNumber);
    stream_cmd->add_option("--level-epsilon", str.level_epsilon, "Accuracy of each compress step")
        ->check(CLI::Range(0.0, 1.0));
    stream_cmd->add_option("--final-epsilon", str.final_epsilon, "Compress the final union once more")
        ->check(CLI::Range(0.0, 1.0));
    stream_cmd->add_option("--out", str.out, "Coreset output (stdout if omitted)");
    stream_cmd->add_option("--report", str.report, "Also write the JSON report here");
    stream_cmd->callback([&] { action = [&] { return run_stream(g, str); }; });

    DistributeOpts dist;
    auto* dist_cmd = app.add_subcommand("distribute", "Simulated distributed construction");
    dist_cmd->add_option("--input", dist.input, "Input dataset")->required();
    dist.sampling.add_to(dist_cmd);
    dist_cmd->add_option("--workers", dist.workers, "Number of workers")->check(CLI::PositiveNumber);
    dist_cmd->add_option("--partition", dist.partition, "rr or contig")->check(CLI::IsMember({"rr", "contig"}));
    dist_cmd->add_option("--out", dist.out, "Merged coreset output (stdout if omitted)");
    dist_cmd->add_option("--report", dist.report, "Also write the JSON report here");
    dist_cmd->add_option("--timing", dist.timing, "Per-worker wall times (JSON)");
    dist_cmd->callback([&] { action = [&] { return run_distribute(g, dist); }; });

    BenchOpts bench;
    auto* bench_cmd = app.add_subcommand("bench", "Compare sampling schemes over repeated trials");
    bench_cmd->add_option("--input", bench.input, "Input dataset")->required();
    bench.sampling.add_to(bench_cmd);
    bench_cmd->add_option("--compare", bench.compare, "Comma-separated: sensitivity,uniform");
    bench_cmd->add_option("--trials", bench.trials, "Trials per method")->check(CLI::PositiveNumber);
    bench_cmd->add_flag("--calibrate", bench.calibrate, "Search for the smallest passing c-size");
    bench_cmd->add_option("--candidates", bench.candidates, "c-size candidates for --calibrate")->delimiter(',');
    bench_cmd->add_option("--target-rate", bench.target_rate, "Required success rate for --calibrate")
        ->check(CLI::Range(0.0, 1.0));
    bench_cmd->add_option("--random-box", bench.random_box, "Random box queries");
    bench_cmd->add_option("--d2-seeded", bench.d2_seeded, "D^2-seeded queries");
    bench_cmd->add_option("--perturbations", bench.perturbations, "Perturbed reference queries");
    bench_cmd->add_option("--out", bench.out, "JSON report path (- for stdout)");
    bench_cmd->add_option("--csv", bench.csv, "Plot-ready per-trial CSV");
    bench_cmd->callback([&] { action = [&] { return run_bench(g, bench); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    const std::map<std::string, cli::LogLevel> levels{{"error", cli::LogLevel::Error},
                                                      {"warn", cli::LogLevel::Warn},
                                                      {"info", cli::LogLevel::Info},
                                                      {"debug", cli::LogLevel::Debug}};
    cli::set_log_level(levels.at(g.log_level));
    set_thread_count(g.threads);

    try {
        return action();
    } catch (const std::exception& e) {
        cli::log(cli::LogLevel::Error, e.what());
        return exit_validation;
    }
}
