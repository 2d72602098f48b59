#pragma once

#include "headrouter/pruner.hpp"

namespace headrouter {

// Method tags as they appear in reports. dart is reserved for an external
// duplication-aware baseline and cannot be run.
enum class Method {
    headrouter,
    headrouter_hard,
    fastv,
    fastv_lastrow,
    frame,
    random,
    oracle,
    dart,
};

const char* method_tag(Method m);
Method parse_method(const std::string& tag);

// Head-averaged scoring over the probe marginals: (1/n_heads) sum_h p_h[k].
std::vector<double> fastv_importance(const HeadMarginals& marginals);

// Variant scoring from the last text row only: per head, the softmax of that
// row's affinities, averaged over heads.
std::vector<double> fastv_lastrow_importance(const SampleBundle& bundle, int threads = 0);

// Uniform temporal subsampling; same stencil as the frame pre-filter.
std::vector<std::size_t> frame_select(std::size_t n_audio, std::size_t k);

// k distinct indices without replacement from mt19937_64 rejection draws;
// identical seed gives identical output on every platform.
std::vector<std::size_t> random_select(std::size_t n_audio, std::size_t k, std::uint64_t seed);

// Top-k by per-token energy, lower index winning ties.
std::vector<std::size_t> oracle_select(std::span<const float> energy, std::size_t k);

// |a intersect b| / |a| for sorted index lists.
double overlap(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Runs any method against a bundle. bank may be null for everything except
// the headrouter variants. Content-blind methods report an indicator vector
// as importance so results keep the retained == top-k(importance) invariant.
PruneResult run_method(const SampleBundle& bundle, const ProfileBank* bank, Method method,
                       const PruneConfig& cfg, int threads = 0);

}  // namespace headrouter
