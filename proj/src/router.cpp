#include "headrouter/router.hpp"

#include <algorithm>
#include <cmath>

#include "headrouter/errors.hpp"

namespace headrouter {

namespace {

template <typename T>
double selectivity_impl(std::span<const T> p) {
    const std::size_t n = p.size();
    if (n < 2) {
        throw Error(ErrorKind::validation, "selectivity needs at least two outcomes");
    }
    double entropy = 0.0;
    for (T v : p) {
        const double x = static_cast<double>(v);
        if (!std::isfinite(x) || x < 0.0) {
            throw Error(ErrorKind::validation, "selectivity input must be a probability vector");
        }
        if (x > 0.0) entropy -= x * std::log(x);
    }
    const double sel = 1.0 - entropy / std::log(static_cast<double>(n));
    // Roundoff can push the ratio a hair past [0, 1]; the definition can't.
    return std::clamp(sel, 0.0, 1.0);
}

Profile nearest_center(double spr, const ProfileBank& bank) {
    const double d_sem = std::abs(spr - bank.mu_sem);
    const double d_uni = std::abs(spr - bank.mu_uni);
    const double d_aco = std::abs(spr - bank.mu_aco);
    const double best = std::min({d_sem, d_uni, d_aco});
    // Exact ties prefer uniform, then semantic.
    if (d_uni == best) return Profile::uniform;
    if (d_sem == best) return Profile::semantic;
    return Profile::acoustic;
}

// Each profile is normalized to sum 1 before mixing, so rescaling a stored
// profile cannot change the decision or the retained set.
std::vector<double> normalized_profile(std::span<const double> w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    std::vector<double> out(w.begin(), w.end());
    for (auto& v : out) v /= sum;
    return out;
}

std::vector<double> mix_profiles(const ProfileBank& bank, const std::array<double, 3>& alphas) {
    std::vector<double> w(bank.n_heads, 0.0);
    for (int c = 0; c < 3; ++c) {
        const auto profile = normalized_profile(bank.profile(static_cast<Profile>(c)));
        for (std::size_t h = 0; h < bank.n_heads; ++h) {
            w[h] += alphas[static_cast<std::size_t>(c)] * profile[h];
        }
    }
    return w;
}

}  // namespace

void validate(const ProfileBank& bank) {
    if (bank.n_heads == 0) throw Error(ErrorKind::validation, "profile bank needs n_heads >= 1");
    for (auto [name, w] : {std::pair<const char*, const std::vector<double>*>{"semantic", &bank.w_sem},
                           {"uniform", &bank.w_uni},
                           {"acoustic", &bank.w_aco}}) {
        if (w->size() != bank.n_heads) {
            throw Error(ErrorKind::validation,
                        std::string(name) + " profile length does not match n_heads");
        }
        bool any_positive = false;
        for (double v : *w) {
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorKind::validation,
                            std::string(name) + " profile has a negative or non-finite weight");
            }
            any_positive = any_positive || v > 0.0;
        }
        if (!any_positive) {
            throw Error(ErrorKind::validation,
                        std::string(name) + " profile must have a positive entry");
        }
    }
    const double uniform = 1.0 / static_cast<double>(bank.n_heads);
    for (double v : bank.w_uni) {
        if (v != uniform) {
            throw Error(ErrorKind::validation, "uniform profile entries must equal 1/n_heads");
        }
    }
    if (!std::isfinite(bank.mu_sem) || !std::isfinite(bank.mu_uni) || !std::isfinite(bank.mu_aco)) {
        throw Error(ErrorKind::validation, "profile centers must be finite");
    }
    if (!(bank.sigma_g > 0.0) || !std::isfinite(bank.sigma_g)) {
        throw Error(ErrorKind::validation, "bandwidth must be positive");
    }
}

double selectivity(std::span<const float> p) { return selectivity_impl(p); }
double selectivity(std::span<const double> p) { return selectivity_impl(p); }

double spread(std::span<const double> sel) {
    if (sel.empty()) throw Error(ErrorKind::validation, "spread needs at least one head");
    double mean = 0.0;
    for (double v : sel) mean += v;
    mean /= static_cast<double>(sel.size());
    double var = 0.0;
    for (double v : sel) var += (v - mean) * (v - mean);
    var /= static_cast<double>(sel.size());
    return std::sqrt(var);
}

SelectivityStats selectivity_stats(const HeadMarginals& marginals) {
    SelectivityStats stats;
    stats.sel.resize(marginals.n_heads);
    for (std::size_t h = 0; h < marginals.n_heads; ++h) {
        stats.sel[h] = selectivity(marginals.row(h));
    }
    stats.spread = spread(stats.sel);
    return stats;
}

RoutingDecision route(double spr, const ProfileBank& bank) {
    validate(bank);
    const double inv_two_sigma_sq = 1.0 / (2.0 * bank.sigma_g * bank.sigma_g);
    std::array<double, 3> kernels{};
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double d = spr - bank.center(static_cast<Profile>(c));
        kernels[static_cast<std::size_t>(c)] = std::exp(-d * d * inv_two_sigma_sq);
        sum += kernels[static_cast<std::size_t>(c)];
    }
    if (sum == 0.0) {
        // All three kernels underflowed; keep the output defined.
        return route_hard(spr, bank);
    }

    RoutingDecision decision;
    decision.stats.spread = spr;
    for (int c = 0; c < 3; ++c) {
        decision.alphas[static_cast<std::size_t>(c)] = kernels[static_cast<std::size_t>(c)] / sum;
    }
    decision.w_star = mix_profiles(bank, decision.alphas);
    return decision;
}

RoutingDecision route_hard(double spr, const ProfileBank& bank) {
    validate(bank);
    RoutingDecision decision;
    decision.stats.spread = spr;
    const Profile winner = nearest_center(spr, bank);
    decision.alphas[static_cast<std::size_t>(winner)] = 1.0;
    decision.w_star = normalized_profile(bank.profile(winner));
    return decision;
}

}  // namespace headrouter
