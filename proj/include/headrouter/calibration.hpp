#pragma once

#include "headrouter/router.hpp"

namespace headrouter {

struct LabeledBundle {
    SampleBundle bundle;
    Category category = Category::semantic;  // semantic or acoustic only
};

struct CalibrationSet {
    std::vector<LabeledBundle> samples;
};

// At least one sample per category, no mixed labels, consistent head counts.
void validate(const CalibrationSet& set);

struct CenterEstimates {
    double mu_sem = 0.0;
    double mu_uni = 0.0;
    double mu_aco = 0.0;
};

// Probe spread of one bundle (full token set, no pre-filter).
double sample_spread(const SampleBundle& bundle, int threads = 0);

// Mean spread per category; mu_uni is the midpoint of the other two.
CenterEstimates estimate_centers(const CalibrationSet& set, int threads = 0);

// max(center span / 4, pooled within-category std of spread), floored at
// 1e-6. Requires mu_sem <= mu_uni <= mu_aco.
double estimate_bandwidth(const CalibrationSet& set, const CenterEstimates& centers,
                          int threads = 0);

// Oracle-alignment stand-in for head-ablation statistics: per category, each
// head's mean probe mass on the energy-oracle top half of tokens, clipped to
// nonnegative and normalized. Every bundle must carry an energy vector.
// Returns (w_sem, w_aco).
std::pair<std::vector<double>, std::vector<double>> estimate_profiles(const CalibrationSet& set,
                                                                      int threads = 0);

ProfileBank calibrate(const CalibrationSet& set, int threads = 0);

}  // namespace headrouter
