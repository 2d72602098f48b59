#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "headrouter/probe.hpp"

namespace headrouter {

// Profile slots, in the fixed mixing order.
enum class Profile : int { semantic = 0, uniform = 1, acoustic = 2 };

struct SelectivityStats {
    std::vector<double> sel;  // one value per head, each in [0, 1]
    double spread = 0.0;      // population std of sel
};

// Calibrated head-weight profiles plus the routing centers and kernel
// bandwidth.
struct ProfileBank {
    std::size_t n_heads = 0;
    std::vector<double> w_sem;
    std::vector<double> w_uni;  // exactly 1/n_heads per entry
    std::vector<double> w_aco;
    double mu_sem = 0.0;
    double mu_uni = 0.0;
    double mu_aco = 0.0;
    double sigma_g = 0.0;  // > 0

    std::span<const double> profile(Profile p) const {
        switch (p) {
            case Profile::semantic: return w_sem;
            case Profile::uniform: return w_uni;
            default: return w_aco;
        }
    }
    double center(Profile p) const {
        switch (p) {
            case Profile::semantic: return mu_sem;
            case Profile::uniform: return mu_uni;
            default: return mu_aco;
        }
    }
};

void validate(const ProfileBank& bank);

struct RoutingDecision {
    SelectivityStats stats;
    std::array<double, 3> alphas{0.0, 0.0, 0.0};  // sem, uni, aco; sums to 1
    std::vector<double> w_star;                   // mixed head weights, >= 0
};

// 1 - H(p)/log(n) with natural logs; zero entries contribute nothing to H.
// Requires n >= 2. Result clamped to [0, 1] against float roundoff.
double selectivity(std::span<const float> p);
double selectivity(std::span<const double> p);

// Population standard deviation.
double spread(std::span<const double> sel);

// Selectivity of every marginal row plus their spread.
SelectivityStats selectivity_stats(const HeadMarginals& marginals);

// Gaussian soft routing: alpha_c proportional to
// exp(-(spr - mu_c)^2 / (2 sigma_g^2)), normalized over the three profiles.
// If all three kernels underflow to exactly zero the nearest-center hard
// assignment is used instead.
RoutingDecision route(double spr, const ProfileBank& bank);

// One-hot assignment to the nearest center; exact ties prefer uniform, then
// semantic.
RoutingDecision route_hard(double spr, const ProfileBank& bank);

// JSON persistence. Values survive a round trip bit-exactly.
void save_profile_bank(const std::filesystem::path& path, const ProfileBank& bank);
ProfileBank load_profile_bank(const std::filesystem::path& path);

}  // namespace headrouter
