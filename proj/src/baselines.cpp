#include "headrouter/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "headrouter/errors.hpp"
#include "headrouter/rng.hpp"

namespace headrouter {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

// Content-blind methods have no scores of their own; an indicator vector
// keeps the retained == top-k(importance) invariant intact.
std::vector<float> indicator_importance(std::size_t n_audio,
                                        std::span<const std::size_t> retained) {
    std::vector<float> imp(n_audio, 0.0f);
    for (std::size_t i : retained) imp[i] = 1.0f;
    return imp;
}

}  // namespace

const char* method_tag(Method m) {
    switch (m) {
        case Method::headrouter: return "headrouter";
        case Method::headrouter_hard: return "headrouter-hard";
        case Method::fastv: return "fastv";
        case Method::fastv_lastrow: return "fastv-lastrow";
        case Method::frame: return "frame";
        case Method::random: return "random";
        case Method::oracle: return "oracle";
        case Method::dart: return "dart";
    }
    return "unknown";
}

Method parse_method(const std::string& tag) {
    if (tag == "headrouter") return Method::headrouter;
    if (tag == "headrouter-hard") return Method::headrouter_hard;
    if (tag == "fastv") return Method::fastv;
    if (tag == "fastv-lastrow") return Method::fastv_lastrow;
    if (tag == "frame") return Method::frame;
    if (tag == "random") return Method::random;
    if (tag == "oracle") return Method::oracle;
    if (tag == "dart") return Method::dart;
    throw Error(ErrorKind::config, "unknown method: " + tag);
}

std::vector<double> fastv_importance(const HeadMarginals& marginals) {
    if (marginals.n_heads == 0 || marginals.n_audio == 0) {
        throw Error(ErrorKind::validation, "marginals must be nonempty");
    }
    std::vector<double> importance(marginals.n_audio, 0.0);
    for (std::size_t h = 0; h < marginals.n_heads; ++h) {
        const auto row = marginals.row(h);
        for (std::size_t k = 0; k < importance.size(); ++k) {
            importance[k] += static_cast<double>(row[k]);
        }
    }
    const double inv = 1.0 / static_cast<double>(marginals.n_heads);
    for (auto& v : importance) v *= inv;
    return importance;
}

std::vector<double> fastv_lastrow_importance(const SampleBundle& bundle, int threads) {
    (void)threads;  // head loop below is cheap; kept serial
    validate(bundle);
    const std::size_t last = bundle.n_text() - 1;
    std::vector<double> importance(bundle.n_audio(), 0.0);
    for (std::size_t h = 0; h < bundle.n_heads(); ++h) {
        auto [q, k] = project_qk(bundle, h);
        const auto a = head_affinity(q, k, bundle.dim_k());
        const auto soft = softmax_row(a, last);
        for (std::size_t i = 0; i < importance.size(); ++i) importance[i] += soft[i];
    }
    const double inv = 1.0 / static_cast<double>(bundle.n_heads());
    for (auto& v : importance) v *= inv;
    return importance;
}

std::vector<std::size_t> frame_select(std::size_t n_audio, std::size_t k) {
    return frame_prefilter(n_audio, k);
}

std::vector<std::size_t> random_select(std::size_t n_audio, std::size_t k, std::uint64_t seed) {
    if (k > n_audio) {
        throw Error(ErrorKind::config, "cannot retain more tokens than exist");
    }
    rng::Rng rng(seed);
    auto picks = rng.sample_without_replacement(n_audio, k);
    std::sort(picks.begin(), picks.end());
    return picks;
}

std::vector<std::size_t> oracle_select(std::span<const float> energy, std::size_t k) {
    if (energy.empty()) {
        throw Error(ErrorKind::config, "oracle selection requires an energy vector");
    }
    return top_k(energy, k);
}

double overlap(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.empty()) throw Error(ErrorKind::validation, "overlap base set must be nonempty");
    std::size_t hits = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++hits;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(a.size());
}

PruneResult run_method(const SampleBundle& bundle, const ProfileBank* bank, Method method,
                       const PruneConfig& cfg, int threads) {
    if (method == Method::headrouter || method == Method::headrouter_hard) {
        if (bank == nullptr) {
            throw Error(ErrorKind::config, "headrouter methods need a profile bank");
        }
        PruneConfig resolved = cfg;
        if (method == Method::headrouter_hard) resolved.routing = RoutingMode::hard;
        return run_pipeline(bundle, *bank, resolved, threads);
    }
    if (method == Method::dart) {
        throw Error(ErrorKind::config, "method tag 'dart' is reserved and not implemented");
    }

    validate(bundle);
    const std::size_t n_audio = bundle.n_audio();
    const std::size_t k = budget(n_audio, cfg.ratio);
    PruneResult result;

    switch (method) {
        case Method::fastv:
        case Method::fastv_lastrow: {
            auto t = Clock::now();
            std::vector<double> scores;
            if (method == Method::fastv) {
                const auto marginals = probe_all_heads(bundle, threads);
                result.timings.probe_ns = elapsed_ns(t);
                t = Clock::now();
                scores = fastv_importance(marginals);
            } else {
                scores = fastv_lastrow_importance(bundle, threads);
                result.timings.probe_ns = elapsed_ns(t);
                t = Clock::now();
            }
            result.timings.scoring_ns = elapsed_ns(t);
            t = Clock::now();
            result.retained = top_k(std::span<const double>(scores), k);
            result.timings.selection_ns = elapsed_ns(t);
            result.importance.assign(scores.begin(), scores.end());
            break;
        }
        case Method::frame: {
            const auto t = Clock::now();
            result.retained = frame_select(n_audio, k);
            result.timings.selection_ns = elapsed_ns(t);
            result.importance = indicator_importance(n_audio, result.retained);
            break;
        }
        case Method::random: {
            const auto t = Clock::now();
            result.retained =
                random_select(n_audio, k, rng::derive_sample_seed(cfg.seed, bundle.sample_id));
            result.timings.selection_ns = elapsed_ns(t);
            result.importance = indicator_importance(n_audio, result.retained);
            break;
        }
        case Method::oracle: {
            if (!bundle.energy) {
                throw Error(ErrorKind::config,
                            "oracle method requires a bundle with an energy vector");
            }
            const auto t = Clock::now();
            result.retained = oracle_select(bundle.energy->data, k);
            result.timings.selection_ns = elapsed_ns(t);
            result.importance = bundle.energy->data;
            break;
        }
        default:
            throw Error(ErrorKind::config, "unhandled method");
    }
    return result;
}

}  // namespace headrouter
