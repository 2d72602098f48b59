#pragma once

#include "headrouter/calibration.hpp"

namespace headrouter {

// Synthetic workload generator. Bundles are constructed so the probe
// recovers designed per-head marginals exactly: a single text token maps to a
// fixed query direction, audio embeddings carry each head's log-target
// logits, and the projections route those logits onto the query direction
// (noise lives in orthogonal directions). Per-category head ladders give
// semantic bundles uniformly diffuse heads, acoustic bundles a sharp
// selective subset, and mixed bundles something in between.
struct GeneratorSpec {
    Category category = Category::semantic;
    std::size_t n_text = 1;
    std::size_t n_audio = 1500;
    std::size_t n_heads = 16;
    std::size_t d = 64;
    std::size_t d_k = 16;
    // Dirichlet concentrations: diffuse mass uses concentration_low, peaked
    // mass uses concentration_high; lower concentration means sharper draws,
    // so concentration_low > concentration_high is required.
    double concentration_low = 48.0;
    double concentration_high = 2.0;
    double fraction_selective_heads = 0.25;  // acoustic/mixed only
    double oracle_fraction = 0.3;            // fraction of tokens marked high-energy
    std::uint64_t seed = 0;
};

void validate(const GeneratorSpec& spec);

// generate() plus the construction internals, for verification: the designed
// marginal distribution of every head and the planted high-energy token set.
struct GeneratedSample {
    SampleBundle bundle;
    std::vector<std::vector<double>> targets;  // n_heads rows of length n_audio
    std::vector<std::size_t> oracle;           // sorted high-energy indices
};

GeneratedSample generate_with_targets(const GeneratorSpec& spec);

// Deterministic: the same spec and seed give a bit-identical bundle.
SampleBundle generate(const GeneratorSpec& spec);

// n semantic + n acoustic bundles with seeds derived from base_seed. Non-seed
// fields of base are reused for every bundle.
CalibrationSet generate_calibration_set(std::size_t n_per_category, std::uint64_t base_seed,
                                        const GeneratorSpec& base = GeneratorSpec{});

}  // namespace headrouter
