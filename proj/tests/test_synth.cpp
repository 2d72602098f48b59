#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "headrouter/baselines.hpp"
#include "headrouter/calibration.hpp"
#include "headrouter/errors.hpp"
#include "headrouter/synth.hpp"
#include "test_util.hpp"

using namespace headrouter;

TEST_CASE("generation is deterministic down to the bits") {
    GeneratorSpec spec;
    spec.category = Category::acoustic;
    spec.n_audio = 200;
    spec.seed = 5;
    const SampleBundle a = generate(spec);
    const SampleBundle b = generate(spec);
    CHECK(a.sample_id == b.sample_id);
    CHECK(a.text.data == b.text.data);
    CHECK(a.audio.data == b.audio.data);
    CHECK(a.q_proj.data == b.q_proj.data);
    CHECK(a.k_proj.data == b.k_proj.data);
    CHECK(a.energy->data == b.energy->data);

    GeneratorSpec other = spec;
    other.seed = 6;
    CHECK(generate(other).audio.data != a.audio.data);
}

TEST_CASE("probe marginals realize the designed targets") {
    for (Category cat : {Category::semantic, Category::acoustic, Category::mixed}) {
        GeneratorSpec spec;
        spec.category = cat;
        spec.seed = 17;
        const GeneratedSample s = generate_with_targets(spec);
        const HeadMarginals m = probe_all_heads(s.bundle);
        for (std::size_t h = 0; h < spec.n_heads; ++h) {
            const auto row = m.row(h);
            double tv = 0.0;
            for (std::size_t k = 0; k < spec.n_audio; ++k) {
                tv += std::abs(static_cast<double>(row[k]) - s.targets[h][k]);
            }
            REQUIRE(0.5 * tv <= 1e-4);
        }
    }
}

TEST_CASE("energy marks exactly the planted oracle tokens") {
    GeneratorSpec spec;
    spec.category = Category::acoustic;
    spec.seed = 23;
    const GeneratedSample s = generate_with_targets(spec);
    const auto picked = oracle_select(s.bundle.energy->data, s.oracle.size());
    CHECK(picked == s.oracle);
}

TEST_CASE("semantic spread sits below acoustic spread at matched seeds") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        GeneratorSpec sem;
        sem.category = Category::semantic;
        sem.seed = seed;
        GeneratorSpec aco;
        aco.category = Category::acoustic;
        aco.seed = seed;
        CHECK(sample_spread(generate(sem)) < sample_spread(generate(aco)));
    }
}

TEST_CASE("category spread distributions separate cleanly") {
    // 200 samples per category at the default spec; the distributions must
    // overlap on at most 5% of samples (empirically they do not touch).
    std::vector<double> sem, aco;
    for (int i = 0; i < 200; ++i) {
        GeneratorSpec s;
        s.category = Category::semantic;
        s.seed = 40000u + static_cast<std::uint64_t>(i);
        sem.push_back(sample_spread(generate(s)));
        s.category = Category::acoustic;
        s.seed = 50000u + static_cast<std::uint64_t>(i);
        aco.push_back(sample_spread(generate(s)));
    }
    const double sem_max = *std::max_element(sem.begin(), sem.end());
    const double aco_min = *std::min_element(aco.begin(), aco.end());
    std::size_t crossings = 0;
    for (double v : sem) crossings += v >= aco_min;
    for (double v : aco) crossings += v <= sem_max;
    CHECK(crossings <= 20);  // 5% of 400
    CHECK(sem_max < aco_min);
}

TEST_CASE("all-selective near-one-hot heads give small spread") {
    GeneratorSpec spec;
    spec.category = Category::acoustic;
    spec.fraction_selective_heads = 1.0;
    spec.concentration_high = 1e-7;
    spec.seed = 11;
    const SampleBundle b = generate(spec);
    const auto stats = selectivity_stats(probe_all_heads(b));
    for (double sel : stats.sel) CHECK(sel > 0.8);
    CHECK(stats.spread < 0.03);
}

TEST_CASE("infeasible specs are rejected") {
    GeneratorSpec spec;
    SUBCASE("d_k too small") {
        spec.d_k = 1;
        CHECK_THROWS_AS(generate(spec), Error);
    }
    SUBCASE("embedding width too small") {
        spec.d = spec.n_heads + 2;
        CHECK_THROWS_AS(generate(spec), Error);
    }
    SUBCASE("inverted concentrations") {
        spec.concentration_low = 1.0;
        spec.concentration_high = 2.0;
        CHECK_THROWS_AS(generate(spec), Error);
    }
    SUBCASE("zero oracle fraction") {
        spec.oracle_fraction = 0.0;
        CHECK_THROWS_AS(generate(spec), Error);
    }
    SUBCASE("zero selective fraction") {
        spec.fraction_selective_heads = 0.0;
        CHECK_THROWS_AS(generate(spec), Error);
    }
}

TEST_CASE("calibration sets have the requested shape and disjoint seeds") {
    GeneratorSpec base;
    base.n_audio = 120;
    const CalibrationSet set = generate_calibration_set(10, 99, base);
    REQUIRE(set.samples.size() == 20);
    std::size_t sem = 0, aco = 0;
    std::vector<std::string> ids;
    for (const auto& s : set.samples) {
        (s.category == Category::semantic ? sem : aco) += 1;
        ids.push_back(s.bundle.sample_id);
        CHECK(s.bundle.energy.has_value());
    }
    CHECK(sem == 10);
    CHECK(aco == 10);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());

    const CalibrationSet minimal = generate_calibration_set(1, 99, base);
    CHECK(minimal.samples.size() == 2);
    CHECK_NOTHROW(validate(minimal));

    CHECK_THROWS_AS(generate_calibration_set(0, 1, base), Error);
}

TEST_CASE("generated bundles pass pipeline plumbing end to end") {
    GeneratorSpec spec;
    spec.category = Category::acoustic;
    spec.seed = 3;
    const SampleBundle b = generate(spec);

    const CalibrationSet set = generate_calibration_set(3, 321);
    const ProfileBank bank = calibrate(set);

    PruneConfig cfg;
    cfg.ratio = 0.6;
    const PruneResult r = run_pipeline(b, bank, cfg);
    REQUIRE(r.decision.has_value());
    // An acoustic-like sample must route mostly to the acoustic profile.
    CHECK(r.decision->alphas[2] ==
          *std::max_element(r.decision->alphas.begin(), r.decision->alphas.end()));
}
