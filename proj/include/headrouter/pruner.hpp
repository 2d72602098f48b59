#pragma once

#include <cstdint>
#include <optional>

#include "headrouter/router.hpp"

namespace headrouter {

enum class RoutingMode { soft, hard, uniform_only };

const char* routing_mode_name(RoutingMode mode);
RoutingMode parse_routing_mode(const std::string& name);

struct PruneConfig {
    double ratio = 0.0;  // fraction of audio tokens to drop, in [0, 1)
    // Fraction of tokens surviving the frame pre-filter, in (0, 1]. Unset
    // picks min(1, 2 * (1 - ratio)) so the adaptive stage always sees a 2x
    // candidate pool; 1 disables the pre-filter.
    std::optional<double> prefilter_keep;
    RoutingMode routing = RoutingMode::soft;
    std::uint64_t seed = 0;  // run seed for stochastic baselines
    // When set, marginals (and the routing signal) come from the full token
    // set and only the final selection is restricted to pre-filter survivors.
    bool probe_before_prefilter = false;
    int pruning_layer = 2;  // metadata only; probe inputs are layer M-1 states

    double resolved_prefilter_keep() const;
};

struct StageTimings {
    std::uint64_t prefilter_ns = 0;
    std::uint64_t probe_ns = 0;
    std::uint64_t routing_ns = 0;
    std::uint64_t scoring_ns = 0;
    std::uint64_t selection_ns = 0;

    std::uint64_t total_ns() const {
        return prefilter_ns + probe_ns + routing_ns + scoring_ns + selection_ns;
    }
};

struct PruneResult {
    // Length n_audio; tokens removed by the pre-filter hold -inf.
    std::vector<float> importance;
    std::vector<std::size_t> retained;  // sorted ascending, length k
    std::optional<RoutingDecision> decision;
    StageTimings timings;
};

// k = floor(n_audio * (1 - ratio)), with a 1e-9 nudge so decimal ratios like
// 0.9 don't lose an integer boundary to binary representation. Throws
// Error(config) when the budget would be zero.
std::size_t budget(std::size_t n_audio, double ratio);

// Divides by the sum; throws on an all-zero (or negative-sum) vector.
std::vector<double> normalize_weights(std::span<const double> w);

// importance[k] = sum_h normalized(w)[h] * p_h[k].
std::vector<double> token_importance(const HeadMarginals& marginals,
                                     std::span<const double> w_star);

// Indices of the k largest scores; ties keep the lower index; result sorted
// ascending.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k);
std::vector<std::size_t> top_k(std::span<const float> scores, std::size_t k);

// Evenly spaced stencil floor(i * n_audio / keep), i in [0, keep).
std::vector<std::size_t> frame_prefilter(std::size_t n_audio, std::size_t keep);

// Full pipeline: frame pre-filter, probe, selectivity/spread, routing,
// head-weighted scoring, top-k selection. Per-stage wall times are recorded;
// everything else is deterministic for a fixed input.
PruneResult run_pipeline(const SampleBundle& bundle, const ProfileBank& bank,
                         const PruneConfig& cfg, int threads = 0);

}  // namespace headrouter
