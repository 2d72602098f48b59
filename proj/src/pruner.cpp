#include "headrouter/pruner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "headrouter/errors.hpp"

namespace headrouter {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

template <typename T>
std::vector<std::size_t> top_k_impl(std::span<const T> scores, std::size_t k) {
    const std::size_t n = scores.size();
    if (k > n) {
        throw Error(ErrorKind::config, "top-k budget " + std::to_string(k) +
                                           " exceeds the number of scores " + std::to_string(n));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;  // ties keep the earlier token
    };
    if (k < n) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                         better);
        idx.resize(k);
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

const char* routing_mode_name(RoutingMode mode) {
    switch (mode) {
        case RoutingMode::soft: return "soft";
        case RoutingMode::hard: return "hard";
        case RoutingMode::uniform_only: return "uniform";
    }
    return "unknown";
}

RoutingMode parse_routing_mode(const std::string& name) {
    if (name == "soft") return RoutingMode::soft;
    if (name == "hard") return RoutingMode::hard;
    if (name == "uniform") return RoutingMode::uniform_only;
    throw Error(ErrorKind::config, "unknown routing mode: " + name);
}

double PruneConfig::resolved_prefilter_keep() const {
    if (prefilter_keep) return *prefilter_keep;
    return std::min(1.0, 2.0 * (1.0 - ratio));
}

std::size_t budget(std::size_t n_audio, double ratio) {
    if (n_audio == 0) throw Error(ErrorKind::config, "need at least one audio token");
    if (!(ratio >= 0.0 && ratio < 1.0)) {
        throw Error(ErrorKind::config, "pruning ratio must lie in [0, 1)");
    }
    const auto k = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_audio) * (1.0 - ratio) + 1e-9));
    if (k == 0) {
        throw Error(ErrorKind::config, "configuration retains zero tokens (n_audio=" +
                                           std::to_string(n_audio) +
                                           ", ratio=" + std::to_string(ratio) + ")");
    }
    return std::min(k, n_audio);
}

std::vector<double> normalize_weights(std::span<const double> w) {
    double sum = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorKind::validation, "head weights must be finite and nonnegative");
        }
        sum += v;
    }
    if (sum <= 0.0) {
        throw Error(ErrorKind::validation, "head weights must not all be zero");
    }
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / sum;
    return out;
}

std::vector<double> token_importance(const HeadMarginals& marginals,
                                     std::span<const double> w_star) {
    if (w_star.size() != marginals.n_heads) {
        throw Error(ErrorKind::validation, "head weight count does not match the marginals");
    }
    const auto w = normalize_weights(w_star);
    std::vector<double> importance(marginals.n_audio, 0.0);
    for (std::size_t h = 0; h < marginals.n_heads; ++h) {
        const auto row = marginals.row(h);
        const double wh = w[h];
        for (std::size_t k = 0; k < importance.size(); ++k) {
            importance[k] += wh * static_cast<double>(row[k]);
        }
    }
    return importance;
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k) {
    return top_k_impl(scores, k);
}

std::vector<std::size_t> top_k(std::span<const float> scores, std::size_t k) {
    return top_k_impl(scores, k);
}

std::vector<std::size_t> frame_prefilter(std::size_t n_audio, std::size_t keep) {
    if (keep == 0 || keep > n_audio) {
        throw Error(ErrorKind::config, "pre-filter keep count must lie in [1, n_audio]");
    }
    std::vector<std::size_t> out(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out[i] = i * n_audio / keep;  // exact integer arithmetic, strictly increasing
    }
    return out;
}

PruneResult run_pipeline(const SampleBundle& bundle, const ProfileBank& bank,
                         const PruneConfig& cfg, int threads) {
    validate(bundle);
    validate(bank);
    if (bank.n_heads != bundle.n_heads()) {
        throw Error(ErrorKind::validation, "profile bank head count does not match the bundle");
    }

    const std::size_t n_audio = bundle.n_audio();
    const std::size_t k = budget(n_audio, cfg.ratio);
    const double f1 = cfg.resolved_prefilter_keep();
    if (!(f1 > 0.0 && f1 <= 1.0)) {
        throw Error(ErrorKind::config, "prefilter keep fraction must lie in (0, 1]");
    }
    if (f1 < 1.0 - cfg.ratio) {
        throw Error(ErrorKind::config, "pre-filter would cut below the final budget");
    }

    PruneResult result;

    // Stage 1: frame pre-filter down to ceil(f1 * n_audio) candidates. The
    // 1e-9 nudge keeps decimal fractions from picking up an extra token.
    auto t = Clock::now();
    std::vector<std::size_t> candidates;
    bool filtered = false;
    if (f1 < 1.0) {
        auto keep = static_cast<std::size_t>(
            std::ceil(f1 * static_cast<double>(n_audio) - 1e-9));
        keep = std::clamp<std::size_t>(keep, 1, n_audio);
        if (keep < n_audio) {
            candidates = frame_prefilter(n_audio, keep);
            filtered = true;
        }
    }
    if (!filtered) {
        candidates.resize(n_audio);
        std::iota(candidates.begin(), candidates.end(), 0);
    }
    if (candidates.size() < k) {
        throw Error(ErrorKind::config, "pre-filter left fewer candidates than the budget");
    }
    result.timings.prefilter_ns = elapsed_ns(t);

    // Stage 2: probe. By default only the candidates are probed; the
    // probe-first variant scores every token and restricts selection later.
    t = Clock::now();
    const bool probe_full = !filtered || cfg.probe_before_prefilter;
    SampleBundle restricted;
    const SampleBundle* probe_input = &bundle;
    if (!probe_full) {
        restricted = restrict_audio(bundle, candidates);
        probe_input = &restricted;
    }
    const HeadMarginals marginals = probe_all_heads(*probe_input, threads);
    result.timings.probe_ns = elapsed_ns(t);

    // Stages 3-4: selectivity, spread, routing.
    t = Clock::now();
    std::vector<double> w_star;
    if (cfg.routing == RoutingMode::uniform_only) {
        w_star = bank.w_uni;
    } else {
        SelectivityStats stats = selectivity_stats(marginals);
        RoutingDecision decision = cfg.routing == RoutingMode::hard
                                       ? route_hard(stats.spread, bank)
                                       : route(stats.spread, bank);
        decision.stats = std::move(stats);
        w_star = decision.w_star;
        result.decision = std::move(decision);
    }
    result.timings.routing_ns = elapsed_ns(t);

    // Stage 5: head-weighted scoring over the probed tokens.
    t = Clock::now();
    const std::vector<double> scores = token_importance(marginals, w_star);
    result.timings.scoring_ns = elapsed_ns(t);

    // Stage 6: top-k over candidates; pre-filtered tokens keep a -inf
    // sentinel and can never be selected because k <= |candidates|.
    t = Clock::now();
    std::vector<double> full(n_audio, -std::numeric_limits<double>::infinity());
    if (probe_full && !filtered) {
        full = scores;
    } else if (probe_full) {
        for (std::size_t c : candidates) full[c] = scores[c];
    } else {
        for (std::size_t i = 0; i < candidates.size(); ++i) full[candidates[i]] = scores[i];
    }
    result.retained = top_k(std::span<const double>(full), k);
    result.timings.selection_ns = elapsed_ns(t);

    result.importance.resize(n_audio);
    for (std::size_t i = 0; i < n_audio; ++i) result.importance[i] = static_cast<float>(full[i]);
    return result;
}

}  // namespace headrouter
