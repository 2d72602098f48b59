#include "headrouter/synth.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "headrouter/errors.hpp"
#include "headrouter/rng.hpp"

namespace headrouter {

namespace {

// Embedding-column layout: columns [0, n_heads) carry each head's log-target
// logits, column n_heads is the text query flag, and everything above is
// noise. In head-projection space, direction 0 carries the logits, direction
// 1 absorbs audio-side noise, and direction 2 (when d_k >= 3) absorbs
// text-side noise; the whole frame is scrambled by a random rotation per
// head, which leaves all dot products intact.
struct Layout {
    std::size_t query_col = 0;
    std::size_t first_noise_col = 0;
};

Layout layout_for(const GeneratorSpec& spec) {
    return Layout{spec.n_heads, spec.n_heads + 1};
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Per-head mass of the peaked component, by category. Selective heads put
// most of their attention on the oracle tokens; the rest stay diffuse with a
// mild deterministic ladder so the spread of a category is a stable,
// construction-controlled quantity.
std::vector<double> head_peak_masses(const GeneratorSpec& spec, rng::Rng& rng) {
    const std::size_t n = spec.n_heads;
    const std::size_t n_sel = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(spec.fraction_selective_heads *
                                                 static_cast<double>(n))));
    std::vector<double> m(n, 0.0);
    auto pos = [](std::size_t i, std::size_t count) {
        return count <= 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
    };
    switch (spec.category) {
        case Category::semantic:
            for (std::size_t h = 0; h < n; ++h) {
                m[h] = lerp(0.10, 0.50, pos(h, n)) + 0.008 * rng.normal();
            }
            break;
        case Category::acoustic:
            for (std::size_t h = 0; h < n; ++h) {
                if (h < std::min(n_sel, n)) {
                    m[h] = 0.92 + 0.01 * rng.normal();
                } else {
                    m[h] = lerp(0.04, 0.10, pos(h - n_sel, n - n_sel)) + 0.005 * rng.normal();
                }
            }
            break;
        case Category::mixed:
            for (std::size_t h = 0; h < n; ++h) {
                if (h < std::min(n_sel, n)) {
                    m[h] = 0.78 + 0.01 * rng.normal();
                } else {
                    m[h] = lerp(0.10, 0.30, pos(h - n_sel, n - n_sel)) + 0.005 * rng.normal();
                }
            }
            break;
    }
    for (auto& v : m) v = std::clamp(v, 0.01, 0.98);
    return m;
}

}  // namespace

void validate(const GeneratorSpec& spec) {
    if (spec.n_text < 1 || spec.n_audio < 2 || spec.n_heads < 1) {
        throw Error(ErrorKind::config, "generator needs n_text >= 1, n_audio >= 2, n_heads >= 1");
    }
    if (spec.d_k < 2) {
        throw Error(ErrorKind::config, "generator needs d_k >= 2 for the noise direction");
    }
    if (spec.d < spec.n_heads + 3) {
        throw Error(ErrorKind::config,
                    "generator needs d >= n_heads + 3 to host logit and noise columns");
    }
    if (!(spec.concentration_low > spec.concentration_high &&
          spec.concentration_high > 0.0)) {
        throw Error(ErrorKind::config,
                    "need concentration_low > concentration_high > 0");
    }
    if (!(spec.fraction_selective_heads > 0.0 && spec.fraction_selective_heads <= 1.0)) {
        throw Error(ErrorKind::config, "fraction_selective_heads must lie in (0, 1]");
    }
    if (!(spec.oracle_fraction > 0.0 && spec.oracle_fraction <= 1.0)) {
        throw Error(ErrorKind::config, "oracle_fraction must lie in (0, 1]");
    }
}

GeneratedSample generate_with_targets(const GeneratorSpec& spec) {
    validate(spec);
    rng::Rng rng(spec.seed);

    const std::size_t n_audio = spec.n_audio;
    const std::size_t n_heads = spec.n_heads;
    const std::size_t d = spec.d;
    const std::size_t d_k = spec.d_k;
    const Layout layout = layout_for(spec);

    // Oracle (high-energy) token set.
    const std::size_t n_oracle = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(spec.oracle_fraction *
                                              static_cast<double>(n_audio))),
        1, n_audio);
    auto oracle = rng.sample_without_replacement(n_audio, n_oracle);
    std::sort(oracle.begin(), oracle.end());
    std::vector<char> is_oracle(n_audio, 0);
    for (std::size_t k : oracle) is_oracle[k] = 1;

    // Designed marginal distribution per head: diffuse Dirichlet everywhere
    // plus a peaked Dirichlet over the oracle tokens, mixed by the category
    // ladder.
    const std::vector<double> peak_mass = head_peak_masses(spec, rng);
    std::vector<std::vector<double>> targets(n_heads);
    for (std::size_t h = 0; h < n_heads; ++h) {
        const auto q_peak = rng.dirichlet(spec.concentration_high, n_oracle);
        const auto q_diff = rng.dirichlet(spec.concentration_low, n_audio);
        auto& t = targets[h];
        t.resize(n_audio);
        const double m = peak_mass[h];
        for (std::size_t k = 0; k < n_audio; ++k) t[k] = (1.0 - m) * q_diff[k];
        for (std::size_t i = 0; i < n_oracle; ++i) t[oracle[i]] += m * q_peak[i];
    }

    SampleBundle bundle;
    bundle.category = spec.category;
    {
        char id[64];
        std::snprintf(id, sizeof(id), "%s-%016llx", category_name(spec.category),
                      static_cast<unsigned long long>(spec.seed));
        bundle.sample_id = id;
    }

    // Audio embeddings: log targets in the head columns, zero in the query
    // column, standard normal noise elsewhere.
    bundle.audio = Tensor::zeros({n_audio, d});
    for (std::size_t k = 0; k < n_audio; ++k) {
        float* row = bundle.audio.data.data() + k * d;
        for (std::size_t h = 0; h < n_heads; ++h) {
            row[h] = static_cast<float>(std::log(targets[h][k]));
        }
        row[layout.query_col] = 0.0f;
        for (std::size_t c = layout.first_noise_col; c < d; ++c) {
            row[c] = static_cast<float>(rng.normal());
        }
    }

    // Text embeddings: the first row has an exact unit query flag so its
    // probe logits equal the designed targets; further rows get a jittered
    // flag (a per-row temperature) and are deliberately inexact.
    bundle.text = Tensor::zeros({spec.n_text, d});
    for (std::size_t j = 0; j < spec.n_text; ++j) {
        float* row = bundle.text.data.data() + j * d;
        for (std::size_t c = 0; c < d; ++c) {
            if (c == layout.query_col) continue;
            row[c] = static_cast<float>(0.5 * rng.normal());
        }
        row[layout.query_col] =
            j == 0 ? 1.0f : static_cast<float>(1.0 + 0.05 * rng.normal());
    }

    // Projections, per head: build in the canonical frame, then rotate Q and
    // K by the same random orthogonal matrix (dot products are preserved).
    bundle.q_proj = Tensor::zeros({n_heads, d, d_k});
    bundle.k_proj = Tensor::zeros({n_heads, d, d_k});
    const double sqrt_dk = std::sqrt(static_cast<double>(d_k));
    for (std::size_t h = 0; h < n_heads; ++h) {
        Eigen::MatrixXd wk = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                   static_cast<Eigen::Index>(d_k));
        Eigen::MatrixXd wq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                   static_cast<Eigen::Index>(d_k));
        for (std::size_t i = 0; i < d; ++i) {
            wk(static_cast<Eigen::Index>(i), 1) = 0.35 * rng.normal();
        }
        wk(static_cast<Eigen::Index>(h), 0) = sqrt_dk;
        for (std::size_t i = 0; i < d; ++i) {
            const double tau = 0.35 * rng.normal();
            if (d_k >= 3 && i != layout.query_col) {
                wq(static_cast<Eigen::Index>(i), 2) = tau;
            }
        }
        wq(static_cast<Eigen::Index>(layout.query_col), 0) = 1.0;

        Eigen::MatrixXd gauss(static_cast<Eigen::Index>(d_k), static_cast<Eigen::Index>(d_k));
        for (Eigen::Index r = 0; r < gauss.rows(); ++r) {
            for (Eigen::Index c = 0; c < gauss.cols(); ++c) gauss(r, c) = rng.normal();
        }
        const Eigen::MatrixXd rotation =
            Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
        wk = wk * rotation;
        wq = wq * rotation;

        float* qdst = bundle.q_proj.data.data() + h * d * d_k;
        float* kdst = bundle.k_proj.data.data() + h * d * d_k;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t c = 0; c < d_k; ++c) {
                qdst[i * d_k + c] = static_cast<float>(
                    wq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
                kdst[i * d_k + c] = static_cast<float>(
                    wk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
            }
        }
    }

    // Binary high/low energy with small noise; the gap dwarfs the noise so
    // the oracle ranking is unambiguous.
    Tensor energy = Tensor::zeros({n_audio});
    for (std::size_t k = 0; k < n_audio; ++k) {
        const double base = is_oracle[k] ? 1.0 : 0.08;
        energy.data[k] = static_cast<float>(base + 0.01 * std::abs(rng.normal()));
    }
    bundle.energy = std::move(energy);

    validate(bundle);
    GeneratedSample sample;
    sample.bundle = std::move(bundle);
    sample.targets = std::move(targets);
    sample.oracle = std::move(oracle);
    return sample;
}

SampleBundle generate(const GeneratorSpec& spec) {
    return generate_with_targets(spec).bundle;
}

CalibrationSet generate_calibration_set(std::size_t n_per_category, std::uint64_t base_seed,
                                        const GeneratorSpec& base) {
    if (n_per_category == 0) {
        throw Error(ErrorKind::config, "calibration set needs at least one sample per category");
    }
    CalibrationSet set;
    std::uint64_t state = base_seed;
    for (Category cat : {Category::semantic, Category::acoustic}) {
        for (std::size_t i = 0; i < n_per_category; ++i) {
            GeneratorSpec spec = base;
            spec.category = cat;
            spec.seed = rng::splitmix64(state);
            LabeledBundle sample;
            sample.bundle = generate(spec);
            {
                char id[64];
                std::snprintf(id, sizeof(id), "%s-%04zu", category_name(cat), i);
                sample.bundle.sample_id = id;
            }
            sample.category = cat;
            set.samples.push_back(std::move(sample));
        }
    }
    return set;
}

}  // namespace headrouter
