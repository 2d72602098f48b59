#include "headrouter/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "headrouter/baselines.hpp"
#include "headrouter/errors.hpp"
#include "headrouter/pruner.hpp"

namespace headrouter {

namespace {

// Stable processing order: sample-id ascending, so float reductions do not
// depend on how the set was assembled.
std::vector<std::size_t> ordered_indices(const CalibrationSet& set) {
    std::vector<std::size_t> idx(set.samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return set.samples[a].bundle.sample_id < set.samples[b].bundle.sample_id;
    });
    return idx;
}

}  // namespace

void validate(const CalibrationSet& set) {
    std::size_t n_sem = 0, n_aco = 0;
    std::size_t n_heads = 0;
    for (const auto& sample : set.samples) {
        switch (sample.category) {
            case Category::semantic: ++n_sem; break;
            case Category::acoustic: ++n_aco; break;
            default:
                throw Error(ErrorKind::validation,
                            "calibration samples must be semantic or acoustic");
        }
        validate(sample.bundle);
        if (n_heads == 0) {
            n_heads = sample.bundle.n_heads();
        } else if (sample.bundle.n_heads() != n_heads) {
            throw Error(ErrorKind::validation,
                        "calibration bundles must agree on the head count");
        }
    }
    if (n_sem == 0 || n_aco == 0) {
        throw Error(ErrorKind::validation,
                    "calibration needs at least one sample per category");
    }
}

double sample_spread(const SampleBundle& bundle, int threads) {
    const auto marginals = probe_all_heads(bundle, threads);
    return selectivity_stats(marginals).spread;
}

CenterEstimates estimate_centers(const CalibrationSet& set, int threads) {
    validate(set);
    double sum_sem = 0.0, sum_aco = 0.0;
    std::size_t n_sem = 0, n_aco = 0;
    for (std::size_t i : ordered_indices(set)) {
        const auto& sample = set.samples[i];
        const double spr = sample_spread(sample.bundle, threads);
        if (sample.category == Category::semantic) {
            sum_sem += spr;
            ++n_sem;
        } else {
            sum_aco += spr;
            ++n_aco;
        }
    }
    CenterEstimates centers;
    centers.mu_sem = sum_sem / static_cast<double>(n_sem);
    centers.mu_aco = sum_aco / static_cast<double>(n_aco);
    centers.mu_uni = 0.5 * (centers.mu_sem + centers.mu_aco);
    return centers;
}

double estimate_bandwidth(const CalibrationSet& set, const CenterEstimates& centers,
                          int threads) {
    validate(set);
    if (!(centers.mu_sem <= centers.mu_uni && centers.mu_uni <= centers.mu_aco)) {
        throw Error(ErrorKind::validation,
                    "bandwidth estimation needs ordered centers mu_sem <= mu_uni <= mu_aco");
    }
    double ss = 0.0;
    std::size_t n = 0;
    for (std::size_t i : ordered_indices(set)) {
        const auto& sample = set.samples[i];
        const double spr = sample_spread(sample.bundle, threads);
        const double mu =
            sample.category == Category::semantic ? centers.mu_sem : centers.mu_aco;
        ss += (spr - mu) * (spr - mu);
        ++n;
    }
    const double within_std = std::sqrt(ss / static_cast<double>(n));
    const double span = centers.mu_aco - centers.mu_sem;
    return std::max({span / 4.0, within_std, 1e-6});
}

std::pair<std::vector<double>, std::vector<double>> estimate_profiles(const CalibrationSet& set,
                                                                      int threads) {
    validate(set);
    std::size_t n_heads = set.samples.front().bundle.n_heads();
    std::vector<double> sum_sem(n_heads, 0.0), sum_aco(n_heads, 0.0);
    std::size_t n_sem = 0, n_aco = 0;

    for (std::size_t i : ordered_indices(set)) {
        const auto& sample = set.samples[i];
        if (!sample.bundle.energy) {
            throw Error(ErrorKind::config,
                        "profile estimation needs an energy vector in every calibration bundle");
        }
        const auto marginals = probe_all_heads(sample.bundle, threads);
        const std::size_t k_half = budget(sample.bundle.n_audio(), 0.5);
        const auto oracle = oracle_select(sample.bundle.energy->data, k_half);

        auto& acc = sample.category == Category::semantic ? sum_sem : sum_aco;
        for (std::size_t h = 0; h < n_heads; ++h) {
            const auto row = marginals.row(h);
            double coverage = 0.0;
            for (std::size_t k : oracle) coverage += static_cast<double>(row[k]);
            acc[h] += coverage;
        }
        (sample.category == Category::semantic ? n_sem : n_aco) += 1;
    }

    auto finish = [](std::vector<double> acc, std::size_t n) {
        for (auto& v : acc) v = std::max(v / static_cast<double>(n), 0.0);
        return normalize_weights(acc);
    };
    return {finish(std::move(sum_sem), n_sem), finish(std::move(sum_aco), n_aco)};
}

ProfileBank calibrate(const CalibrationSet& set, int threads) {
    const auto centers = estimate_centers(set, threads);
    const double sigma = estimate_bandwidth(set, centers, threads);
    auto [w_sem, w_aco] = estimate_profiles(set, threads);

    ProfileBank bank;
    bank.n_heads = set.samples.front().bundle.n_heads();
    bank.w_sem = std::move(w_sem);
    bank.w_aco = std::move(w_aco);
    bank.w_uni.assign(bank.n_heads, 1.0 / static_cast<double>(bank.n_heads));
    bank.mu_sem = centers.mu_sem;
    bank.mu_uni = centers.mu_uni;
    bank.mu_aco = centers.mu_aco;
    bank.sigma_g = sigma;
    validate(bank);
    return bank;
}

}  // namespace headrouter
