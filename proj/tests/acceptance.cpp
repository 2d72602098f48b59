// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances and thresholds are pinned in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <vector>

#include "headrouter/baselines.hpp"
#include "headrouter/calibration.hpp"
#include "headrouter/errors.hpp"
#include "headrouter/rng.hpp"
#include "headrouter/router.hpp"
#include "headrouter/synth.hpp"
#include "headrouter/tensor.hpp"
#include "test_util.hpp"

using namespace headrouter;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

struct Criterion {
    int number;
    const char* name;
    double time_limit_s;  // 0 = no limit stated

    void run(const std::function<bool(std::string&)>& body) const {
        std::string detail;
        bool ok = false;
        const auto start = Clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
            ok = false;
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (time_limit_s > 0.0 && seconds > time_limit_s) {
            ok = false;
            detail += " [exceeded " + std::to_string(time_limit_s) + " s limit]";
        }
        std::printf("%s criterion %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, name,
                    seconds, detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++failures;
    }
};

std::vector<double> dvec(std::initializer_list<double> v) { return std::vector<double>(v); }

ProfileBank plain_bank(std::size_t n_heads, double mu_sem, double mu_uni, double mu_aco,
                       double sigma) {
    ProfileBank bank;
    bank.n_heads = n_heads;
    bank.w_sem.assign(n_heads, 1.0 / static_cast<double>(n_heads));
    bank.w_uni.assign(n_heads, 1.0 / static_cast<double>(n_heads));
    bank.w_aco.assign(n_heads, 1.0 / static_cast<double>(n_heads));
    bank.mu_sem = mu_sem;
    bank.mu_uni = mu_uni;
    bank.mu_aco = mu_aco;
    bank.sigma_g = sigma;
    return bank;
}

// 1. Selectivity correctness.
bool criterion_selectivity(std::string& detail) {
    if (std::abs(selectivity(std::span<const double>(dvec({0.25, 0.25, 0.25, 0.25})))) > 1e-9) {
        detail = "uniform distribution not at 0";
        return false;
    }
    for (std::size_t n : {2, 5, 64, 1000}) {
        std::vector<double> one_hot(n, 0.0);
        one_hot[n / 2] = 1.0;
        if (std::abs(selectivity(std::span<const double>(one_hot)) - 1.0) > 1e-9) {
            detail = "one-hot not at 1 for n=" + std::to_string(n);
            return false;
        }
    }
    if (std::abs(selectivity(std::span<const double>(dvec({0.5, 0.5, 0.0, 0.0}))) - 0.5) >
        1e-9) {
        detail = "[0.5,0.5,0,0] not at 0.5";
        return false;
    }
    rng::Rng rng(101);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + rng.bounded(63);
        const auto p = rng.dirichlet(0.05 + 2.0 * rng.uniform01(), n);
        const double s = selectivity(std::span<const double>(p));
        if (!(s >= 0.0 && s <= 1.0)) {
            detail = "selectivity out of [0,1]";
            return false;
        }
    }
    return true;
}

// 2. Routing simplex and limits.
bool criterion_routing_limits(std::string& detail) {
    rng::Rng rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
        const double mu_sem = rng.uniform01();
        const double span = 0.01 + rng.uniform01();
        const ProfileBank bank =
            plain_bank(4, mu_sem, mu_sem + span / 2, mu_sem + span, 0.02 + rng.uniform01());
        const auto d = route(rng.uniform01() * 2.0, bank);
        const double sum = d.alphas[0] + d.alphas[1] + d.alphas[2];
        if (std::abs(sum - 1.0) > 1e-9) {
            detail = "alphas do not sum to 1";
            return false;
        }
    }

    const double span = 0.2;
    const ProfileBank flat = plain_bank(4, 0.1, 0.2, 0.3, 1e6 * span);
    const auto d = route(0.17, flat);
    for (double a : d.alphas) {
        if (std::abs(a - 1.0 / 3.0) > 1e-6) {
            detail = "flat-kernel limit not 1/3";
            return false;
        }
    }

    const ProfileBank tight = plain_bank(4, 0.1, 0.2, 0.3, 1e-6 * span);
    int checked = 0;
    for (int trial = 0; checked < 1000; ++trial) {
        const double spr = -0.1 + 0.6 * rng.uniform01();
        double gap = std::abs(std::abs(spr - 0.1) - std::abs(spr - 0.2));
        gap = std::min(gap, std::abs(std::abs(spr - 0.2) - std::abs(spr - 0.3)));
        gap = std::min(gap, std::abs(std::abs(spr - 0.1) - std::abs(spr - 0.3)));
        if (gap < 1e-3) continue;
        ++checked;
        const auto soft = route(spr, tight);
        const auto hard = route_hard(spr, tight);
        const auto argmax = [](const std::array<double, 3>& a) {
            return std::max_element(a.begin(), a.end()) - a.begin();
        };
        if (argmax(soft.alphas) != argmax(hard.alphas)) {
            detail = "sharp-kernel limit disagrees with hard routing";
            return false;
        }
    }

    const ProfileBank bank = plain_bank(4, 0.1, 0.2, 0.3, 0.05);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const double spr = 0.05 + 0.3 * static_cast<double>(i) / 99.0;
        const auto dec = route(spr, bank);
        const double ratio = std::log(dec.alphas[2] / dec.alphas[0]);
        if (!(ratio > prev)) {
            detail = "log alpha ratio not strictly increasing";
            return false;
        }
        prev = ratio;
    }
    return true;
}

// 3. Worked routing value against an independently computed fixture.
bool criterion_worked_routing(std::string& detail) {
    // Frozen 50-digit evaluation of the Gaussian kernel mix at centers
    // (0.10, 0.20, 0.30), sigma 0.05, signal 0.12.
    const double fixture[3] = {0.76754466891240025, 0.23118001166048248,
                               0.0012753194271172781};
    // Independent long-double evaluation of the same expression.
    long double kernels[3];
    const long double centers[3] = {0.10L, 0.20L, 0.30L};
    long double sum = 0.0L;
    for (int c = 0; c < 3; ++c) {
        const long double z = (0.12L - centers[c]);
        kernels[c] = expl(-z * z / (2.0L * 0.05L * 0.05L));
        sum += kernels[c];
    }
    for (int c = 0; c < 3; ++c) {
        if (std::abs(static_cast<double>(kernels[c] / sum) - fixture[c]) > 1e-12) {
            detail = "fixture disagrees with the long-double evaluation";
            return false;
        }
    }

    const auto d = route(0.12, plain_bank(4, 0.1, 0.2, 0.3, 0.05));
    const double quoted[3] = {0.7675, 0.2312, 0.0013};
    for (int c = 0; c < 3; ++c) {
        if (std::abs(d.alphas[static_cast<std::size_t>(c)] - fixture[c]) > 1e-12) {
            detail = "implementation disagrees with the fixture";
            return false;
        }
        if (std::abs(d.alphas[static_cast<std::size_t>(c)] - quoted[c]) > 1e-3) {
            detail = "implementation outside 1e-3 of the quoted values";
            return false;
        }
    }
    return true;
}

// 4. Top-k oracle equivalence.
bool criterion_topk(std::string& detail) {
    rng::Rng rng(404);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.bounded(2000);
        std::vector<double> scores(n);
        for (auto& s : scores) s = static_cast<double>(rng.bounded(64)) / 9.0;
        const std::size_t k = 1 + rng.bounded(n);

        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });
        idx.resize(k);
        std::sort(idx.begin(), idx.end());

        if (top_k(std::span<const double>(scores), k) != idx) {
            detail = "mismatch at trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

// 5. FastV equivalence under the uniform profile.
bool criterion_fastv(std::string& detail) {
    rng::Rng rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n_heads = 1 + rng.bounded(16);
        const std::size_t n_audio = 2 + rng.bounded(200);
        HeadMarginals m;
        m.n_heads = n_heads;
        m.n_audio = n_audio;
        for (std::size_t h = 0; h < n_heads; ++h) {
            for (double v : rng.dirichlet(0.5, n_audio)) m.p.push_back(static_cast<float>(v));
        }
        const auto fv = fastv_importance(m);
        const auto ti = token_importance(
            m, std::vector<double>(n_heads, 1.0 / static_cast<double>(n_heads)));
        for (std::size_t k = 0; k < n_audio; ++k) {
            if (std::abs(fv[k] - ti[k]) > 1e-9) {
                detail = "importance differs beyond 1e-9";
                return false;
            }
        }
        const std::size_t k = 1 + rng.bounded(n_audio);
        if (top_k(std::span<const double>(fv), k) != top_k(std::span<const double>(ti), k)) {
            detail = "retained sets differ";
            return false;
        }
    }
    return true;
}

// 6. Permutation equivariance of the full pipeline at f1 = 1.
bool criterion_permutation(std::string& detail) {
    rng::Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n_audio = 8 + rng.bounded(48);
        const std::size_t n_heads = 1 + rng.bounded(6);
        const SampleBundle b =
            testutil::random_bundle(rng, 1 + rng.bounded(3), n_audio, n_heads,
                                    2 + rng.bounded(6), 2 + rng.bounded(4));
        const auto perm = rng.sample_without_replacement(n_audio, n_audio);
        const SampleBundle moved = testutil::permute_audio(b, perm);

        PruneConfig cfg;
        cfg.ratio = 0.5;
        cfg.prefilter_keep = 1.0;
        const ProfileBank bank = plain_bank(n_heads, 0.1, 0.2, 0.3, 0.05);
        const auto base = run_pipeline(b, bank, cfg).retained;
        const auto mapped = run_pipeline(moved, bank, cfg).retained;

        std::vector<std::size_t> inverse(n_audio);
        for (std::size_t i = 0; i < n_audio; ++i) inverse[perm[i]] = i;
        std::vector<std::size_t> expected;
        expected.reserve(base.size());
        for (std::size_t s : base) expected.push_back(inverse[s]);
        std::sort(expected.begin(), expected.end());
        if (mapped != expected) {
            detail = "retained set did not map through the permutation";
            return false;
        }
    }
    return true;
}

// 7. Budget formula, exhaustive at the evaluation ratios.
bool criterion_budget(std::string& detail) {
    const std::pair<double, std::size_t> ratios[] = {{0.3, 7}, {0.6, 4}, {0.9, 1}};
    for (const auto& [r, mul] : ratios) {
        for (std::size_t n = 1; n <= 1000; ++n) {
            const std::size_t exact = n * mul / 10;
            if (exact == 0) {
                try {
                    budget(n, r);
                    detail = "k = 0 not rejected at n=" + std::to_string(n);
                    return false;
                } catch (const Error&) {
                }
            } else if (budget(n, r) != exact) {
                detail = "wrong budget at n=" + std::to_string(n);
                return false;
            }
        }
    }
    return true;
}

// 8. Routing separation on synthetic data.
bool criterion_separation(std::string& detail) {
    const auto bank = calibrate(generate_calibration_set(10, 7));
    int correct = 0;
    for (int cat = 0; cat < 2; ++cat) {
        for (int i = 0; i < 100; ++i) {
            GeneratorSpec spec;
            spec.category = cat == 0 ? Category::semantic : Category::acoustic;
            spec.seed = 910000u + static_cast<std::uint64_t>(cat) * 10000u +
                        static_cast<std::uint64_t>(i);
            const auto dec = route(sample_spread(generate(spec)), bank);
            const auto argmax =
                std::max_element(dec.alphas.begin(), dec.alphas.end()) - dec.alphas.begin();
            correct += argmax == (cat == 0 ? 0 : 2);
        }
    }
    detail = std::to_string(correct) + "/200 dominant alphas match";
    return correct >= 190;
}

// 9. Calibration stability, 10 vs 50 samples per category.
bool criterion_stability(std::string& detail) {
    const auto c10 = estimate_centers(generate_calibration_set(10, 7));
    const auto c50 = estimate_centers(generate_calibration_set(50, 1007));
    const double rel_sem = std::abs(c10.mu_sem - c50.mu_sem) / std::abs(c50.mu_sem);
    const double rel_aco = std::abs(c10.mu_aco - c50.mu_aco) / std::abs(c50.mu_aco);
    const double rel_uni = std::abs(c10.mu_uni - c50.mu_uni) / std::abs(c50.mu_uni);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "relative deltas sem %.3f%% uni %.3f%% aco %.3f%%",
                  100 * rel_sem, 100 * rel_uni, 100 * rel_aco);
    detail = buf;
    return rel_sem < 0.05 && rel_uni < 0.05 && rel_aco < 0.05;
}

// 10. Routing overhead below 1% of pipeline time at scale.
bool criterion_overhead(std::string& detail) {
    GeneratorSpec spec;
    spec.category = Category::mixed;
    spec.n_audio = 9000;
    spec.n_text = 64;
    spec.n_heads = 16;
    spec.d = 2048;
    spec.d_k = 128;
    spec.seed = 1;
    const SampleBundle bundle = generate(spec);
    const ProfileBank bank = plain_bank(16, 0.1, 0.2, 0.3, 0.05);
    PruneConfig cfg;
    cfg.ratio = 0.3;
    cfg.prefilter_keep = 1.0;

    std::vector<double> fractions;
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = run_pipeline(bundle, bank, cfg).timings;
        fractions.push_back(static_cast<double>(t.routing_ns) /
                            static_cast<double>(t.total_ns()));
    }
    std::sort(fractions.begin(), fractions.end());
    const double median = fractions[fractions.size() / 2];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "median routing fraction %.4f%%", 100 * median);
    detail = buf;
    return median < 0.01;
}

// 11. Oracle alignment ordering at r = 0.6.
bool criterion_oracle_alignment(std::string& detail) {
    const auto bank = calibrate(generate_calibration_set(10, 7));
    double sum_hr = 0.0, sum_frame = 0.0, sum_random = 0.0;
    const int samples = 100;
    for (int i = 0; i < samples; ++i) {
        GeneratorSpec spec;
        spec.category = Category::acoustic;
        spec.seed = 880000u + static_cast<std::uint64_t>(i);
        const SampleBundle b = generate(spec);
        PruneConfig cfg;
        cfg.ratio = 0.6;
        cfg.seed = 99;
        const auto oracle = oracle_select(b.energy->data, budget(b.n_audio(), cfg.ratio));
        sum_hr += overlap(run_method(b, &bank, Method::headrouter, cfg).retained, oracle);
        sum_frame += overlap(run_method(b, nullptr, Method::frame, cfg).retained, oracle);
        sum_random += overlap(run_method(b, nullptr, Method::random, cfg).retained, oracle);
    }
    const double hr = sum_hr / samples, fr = sum_frame / samples, rd = sum_random / samples;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "mean overlap: headrouter %.3f frame %.3f random %.3f", hr,
                  fr, rd);
    detail = buf;
    return hr >= fr + 0.10 && hr >= rd + 0.10;
}

// 12. Serialization: bit-exact tensors, lossless banks, designated errors.
bool criterion_serialization(std::string& detail) {
    testutil::TempDir dir("acceptance-io");
    rng::Rng rng(909);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rank = 1 + rng.bounded(4);
        std::vector<std::uint64_t> dims(rank);
        std::size_t n = 1;
        for (auto& d : dims) {
            d = 1 + rng.bounded(8);
            n *= d;
        }
        Tensor t;
        t.dims = dims;
        t.data.resize(n);
        for (auto& v : t.data) v = static_cast<float>(rng.normal() * 1e2);
        const auto path = dir.path / "t.hrtn";
        write_tensor(path, t);
        const Tensor back = read_tensor(path);
        if (back.dims != t.dims ||
            std::memcmp(back.data.data(), t.data.data(), 4 * n) != 0) {
            detail = "tensor round trip not bit-exact";
            return false;
        }
    }

    ProfileBank bank = plain_bank(16, 0.0123456789012345, 0.2, 0.3456789012345678, 0.05);
    rng::Rng wrng(910);
    bank.w_sem = wrng.dirichlet(1.0, 16);
    bank.w_aco = wrng.dirichlet(1.0, 16);
    const auto bank_path = dir.path / "bank.json";
    save_profile_bank(bank_path, bank);
    const ProfileBank back = load_profile_bank(bank_path);
    if (back.w_sem != bank.w_sem || back.w_aco != bank.w_aco || back.mu_sem != bank.mu_sem ||
        back.mu_aco != bank.mu_aco || back.sigma_g != bank.sigma_g) {
        detail = "profile bank round trip lost precision";
        return false;
    }

    // Designated error kinds on corrupted files.
    Tensor t({2, 2}, {1.0f, 2.0f, 3.0f, 4.0f});
    const auto path = dir.path / "c.hrtn";
    const auto expect_kind = [&](ErrorKind want, const char* what) {
        try {
            read_tensor(path);
        } catch (const Error& e) {
            if (e.kind() == want) return true;
            detail = std::string(what) + ": wrong kind " + error_kind_name(e.kind());
            return false;
        }
        detail = std::string(what) + ": no error raised";
        return false;
    };

    write_tensor(path, t);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
    }
    if (!expect_kind(ErrorKind::bad_magic, "bad magic")) return false;

    write_tensor(path, t);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char two = 2;
        f.write(&two, 1);
    }
    if (!expect_kind(ErrorKind::version_mismatch, "version")) return false;

    write_tensor(path, t);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
    if (!expect_kind(ErrorKind::truncated, "truncation")) return false;

    write_tensor(path, t);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(28);
        const std::uint32_t nan_bits = 0x7FC00000u;
        f.write(reinterpret_cast<const char*>(&nan_bits), 4);
    }
    if (!expect_kind(ErrorKind::non_finite, "non-finite")) return false;

    return true;
}

}  // namespace

int main() {
    std::printf("acceptance suite (%s)\n", "headrouter");

    Criterion{1, "selectivity correctness", 1.0}.run(criterion_selectivity);
    Criterion{2, "routing simplex and limits", 1.0}.run(criterion_routing_limits);
    Criterion{3, "worked routing value", 0.0}.run(criterion_worked_routing);
    Criterion{4, "top-k oracle equivalence", 5.0}.run(criterion_topk);
    Criterion{5, "fastv equivalence under uniform weights", 0.0}.run(criterion_fastv);
    Criterion{6, "pipeline permutation equivariance", 0.0}.run(criterion_permutation);
    Criterion{7, "budget formula", 0.0}.run(criterion_budget);
    Criterion{8, "routing separation on synthetic data", 30.0}.run(criterion_separation);
    Criterion{9, "calibration stability", 60.0}.run(criterion_stability);
    Criterion{10, "routing overhead below 1%", 300.0}.run(criterion_overhead);
    Criterion{11, "oracle alignment ordering", 60.0}.run(criterion_oracle_alignment);
    Criterion{12, "serialization round trips and error kinds", 0.0}.run(criterion_serialization);

    if (failures != 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
