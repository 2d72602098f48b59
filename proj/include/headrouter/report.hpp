#pragma once

#include <map>
#include <string>

#include "headrouter/baselines.hpp"

namespace headrouter {

// Provenance block embedded in every report so results are reproducible from
// the report alone. Wall-clock fields are the only nondeterministic content.
struct RunManifest {
    std::string tool = "headrouter";
    std::string version;
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
    std::uint64_t wall_ns = 0;
};

struct PruneReport {
    std::string sample_id;
    std::string method;  // method tag
    double ratio = 0.0;
    std::size_t budget_k = 0;
    std::optional<Category> category;
    std::vector<float> importance;  // -inf marks pre-filtered tokens
    std::vector<std::size_t> retained;
    // Routing fields, present only for the headrouter variants.
    std::optional<std::string> routing_mode;
    std::optional<double> spread;
    std::optional<std::array<double, 3>> alphas;
    StageTimings timings;
    RunManifest manifest;
};

PruneReport make_report(const SampleBundle& bundle, Method method, const PruneConfig& cfg,
                        const PruneResult& result);

void write_prune_report(const std::filesystem::path& path, const PruneReport& report);

// Validates retained-set invariants on the way in; a stored report can never
// yield an invariant-violating value.
PruneReport read_prune_report(const std::filesystem::path& path);

// FNV-1a 64 over a file's bytes, as lowercase hex.
std::string hash_file(const std::filesystem::path& path);

const char* tool_version();

}  // namespace headrouter
