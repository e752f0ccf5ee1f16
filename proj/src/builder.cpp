#include "coreset/builder.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace coreset {

std::string_view to_string(SamplingDistribution d) noexcept {
    return d == SamplingDistribution::Sensitivity ? "sensitivity" : "uniform";
}

Coreset importance_sample(const WeightedDataset& data, std::span<const double> q, std::size_t m,
                          Rng& rng, bool merge_duplicates) {
    const std::size_t n = data.size();
    if (m == 0) {
        throw std::invalid_argument("importance sampling needs m >= 1");
    }
    if (q.size() != n) {
        throw std::invalid_argument("sampling distribution has " + std::to_string(q.size()) +
                                    " entries for " + std::to_string(n) + " points");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(q[i] >= 0.0) || !std::isfinite(q[i])) {
            throw std::invalid_argument("sampling probabilities must be finite and non-negative");
        }
        if (q[i] == 0.0 && data.weight(i) > 0.0) {
            throw std::invalid_argument("q(x) = 0 at positive-weight point " + std::to_string(i) +
                                        "; the estimator would be biased");
        }
    }
    if (std::abs(compensated_sum(q) - 1.0) > 1e-12) {
        throw std::invalid_argument("sampling probabilities must sum to 1");
    }

    const DiscreteSampler sampler(q);
    const double md = static_cast<double>(m);
    std::vector<std::size_t> draws(m);
    for (std::size_t t = 0; t < m; ++t) {
        draws[t] = sampler(rng);
    }

    std::vector<double> pts;
    std::vector<double> ws;
    std::vector<std::size_t> source;
    auto emit = [&](std::size_t i, double count) {
        const double w = count * data.weight(i) / (md * q[i]);
        if (w <= 0.0) {
            return;  // zero-weight source point: contributes nothing to any cost
        }
        const auto p = data.point(i);
        pts.insert(pts.end(), p.begin(), p.end());
        ws.push_back(w);
        source.push_back(i);
    };

    if (merge_duplicates) {
        std::map<std::size_t, std::size_t> counts;
        for (std::size_t i : draws) {
            ++counts[i];
        }
        for (const auto& [i, c] : counts) {
            emit(i, static_cast<double>(c));
        }
    } else {
        for (std::size_t i : draws) {
            emit(i, 1.0);
        }
    }
    if (ws.empty()) {
        throw std::runtime_error("every draw landed on a zero-weight point");
    }

    Provenance prov;
    prov.m = m;
    prov.source_n = n;
    prov.merged_duplicates = merge_duplicates;
    return Coreset{WeightedDataset(std::move(pts), std::move(ws), data.dim()), std::move(source), prov};
}

Coreset merge_coresets(std::span<const Coreset> parts, std::span<const std::size_t> offsets) {
    if (parts.empty()) {
        throw std::invalid_argument("nothing to merge");
    }
    if (offsets.size() != parts.size()) {
        throw std::invalid_argument("one offset per merged part is required");
    }
    const std::size_t dim = parts.front().data.dim();
    std::vector<double> pts;
    std::vector<double> ws;
    std::vector<std::size_t> source;
    Provenance prov = parts.front().provenance;
    prov.m = 0;
    prov.source_n = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        const Coreset& c = parts[p];
        check_same_dim(c.data.dim(), dim, "merge_coresets");
        pts.insert(pts.end(), c.data.points().begin(), c.data.points().end());
        ws.insert(ws.end(), c.data.weights().begin(), c.data.weights().end());
        for (std::size_t i : c.source_index) {
            source.push_back(i + offsets[p]);
        }
        prov.m += c.provenance.m;
        prov.source_n += c.provenance.source_n;
        prov.merged_duplicates = prov.merged_duplicates && c.provenance.merged_duplicates;
    }
    return Coreset{WeightedDataset(std::move(pts), std::move(ws), dim), std::move(source), prov};
}

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
    }
}

std::size_t ceil_to_count(double v) {
    if (!std::isfinite(v) || v > 1e18) {
        throw std::overflow_error("recommended sample size overflows");
    }
    return static_cast<std::size_t>(std::ceil(v));
}

}  // namespace

std::size_t recommended_m(const SampleSizeSpec& spec) {
    check_unit_interval(spec.epsilon, "epsilon");
    check_unit_interval(spec.delta, "delta");
    if (spec.k == 0 || spec.d == 0) {
        throw std::invalid_argument("sample size needs d >= 1 and k >= 1");
    }
    if (!(spec.c_size > 0.0)) {
        throw std::invalid_argument("sample size constant must be positive");
    }
    const double k = static_cast<double>(spec.k);
    const double eps2 = spec.epsilon * spec.epsilon;
    const double log_delta = std::log(1.0 / spec.delta);
    if (spec.pdim_override) {
        const double total = 6.0 * d2_alpha(spec.k) + 4.0 * k;
        return ceil_to_count(spec.c_size * total * total *
                             (static_cast<double>(*spec.pdim_override) + log_delta) / eps2);
    }
    const double d = static_cast<double>(spec.d);
    const double log_k = std::log2(std::max(k, 2.0));
    return ceil_to_count(spec.c_size * (d * k * k * k * log_k + k * k * log_delta) / eps2);
}

BuildResult build_kmeans_coreset_detailed(const WeightedDataset& data, std::size_t k, double epsilon,
                                          double delta, std::optional<std::size_t> m, std::uint64_t seed,
                                          const BuildOptions& options) {
    check_unit_interval(epsilon, "epsilon");
    check_unit_interval(delta, "delta");
    if (!data.has_uniform_weights() && !options.sensitivity.generalized_weights) {
        throw std::invalid_argument(
            "coreset construction needs uniform weights; enable generalized weights for weighted input");
    }

    Bicriteria b = bicriteria(data, k, delta / 2.0, derive_seed(seed, stream::bicriteria),
                              options.bicriteria);
    SensitivityProfile profile = sensitivity_bound(data, b, options.sensitivity);

    const std::size_t n = data.size();
    std::vector<double> q(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = profile.generalized ? data.weight(i) * profile.s[i] : profile.s[i];
        norm += q[i];
    }
    for (double& v : q) {
        v /= norm;
    }

    const std::size_t draws =
        m ? *m
          : recommended_m({data.dim(), k, epsilon, delta / 2.0, options.c_size, std::nullopt});

    Rng rng(derive_seed(seed, stream::sampling));
    Coreset c = importance_sample(data, q, draws, rng, options.merge_duplicates);
    c.provenance.seed = seed;
    c.provenance.epsilon_target = epsilon;
    c.provenance.distribution = SamplingDistribution::Sensitivity;
    return BuildResult{std::move(c), std::move(b), std::move(profile), std::move(q)};
}

Coreset uniform_baseline(const WeightedDataset& data, std::size_t m, std::uint64_t seed,
                         bool merge_duplicates) {
    std::vector<double> q(data.weights().begin(), data.weights().end());
    for (double& v : q) {
        v /= data.total_weight();
    }
    Rng rng(derive_seed(seed, stream::sampling));
    Coreset c = importance_sample(data, q, m, rng, merge_duplicates);
    c.provenance.seed = seed;
    c.provenance.distribution = SamplingDistribution::Uniform;
    return c;
}

}  // namespace coreset
