#include <cmath>
#include <fstream>

#include <json.hpp>

#include "headrouter/errors.hpp"
#include "headrouter/router.hpp"

namespace headrouter {

using nlohmann::json;

namespace {

std::vector<double> read_profile(const json& j, const char* name, std::size_t n_heads) {
    if (!j.contains(name) || !j[name].is_array()) {
        throw Error(ErrorKind::validation, std::string("profile bank missing profile: ") + name);
    }
    std::vector<double> w = j[name].get<std::vector<double>>();
    if (w.size() != n_heads) {
        throw Error(ErrorKind::validation,
                    std::string(name) + " profile length does not match n_heads");
    }
    return w;
}

double read_number(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_number()) {
        throw Error(ErrorKind::validation, std::string("profile bank missing field: ") + name);
    }
    return j[name].get<double>();
}

}  // namespace

void save_profile_bank(const std::filesystem::path& path, const ProfileBank& bank) {
    validate(bank);
    json doc = {
        {"n_heads", bank.n_heads},
        {"profiles",
         {{"semantic", bank.w_sem}, {"uniform", bank.w_uni}, {"acoustic", bank.w_aco}}},
        {"centers",
         {{"semantic", bank.mu_sem}, {"uniform", bank.mu_uni}, {"acoustic", bank.mu_aco}}},
        {"bandwidth", bank.sigma_g},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open for writing: " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

ProfileBank load_profile_bank(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open profile bank: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation,
                    "malformed profile bank " + path.string() + ": " + e.what());
    }

    ProfileBank bank;
    if (!doc.contains("n_heads") || !doc["n_heads"].is_number_unsigned()) {
        throw Error(ErrorKind::validation, "profile bank missing field: n_heads");
    }
    bank.n_heads = doc["n_heads"].get<std::size_t>();
    if (bank.n_heads == 0) {
        throw Error(ErrorKind::validation, "profile bank needs n_heads >= 1");
    }
    if (!doc.contains("profiles") || !doc.contains("centers")) {
        throw Error(ErrorKind::validation, "profile bank missing profiles or centers");
    }
    bank.w_sem = read_profile(doc["profiles"], "semantic", bank.n_heads);
    bank.w_uni = read_profile(doc["profiles"], "uniform", bank.n_heads);
    bank.w_aco = read_profile(doc["profiles"], "acoustic", bank.n_heads);
    bank.mu_sem = read_number(doc["centers"], "semantic");
    bank.mu_uni = read_number(doc["centers"], "uniform");
    bank.mu_aco = read_number(doc["centers"], "acoustic");
    bank.sigma_g = read_number(doc, "bandwidth");

    // Externally produced banks may round the uniform entries in decimal;
    // accept anything within 1e-9 and snap to the exact value the invariant
    // demands.
    const double uniform = 1.0 / static_cast<double>(bank.n_heads);
    for (double& v : bank.w_uni) {
        if (std::abs(v - uniform) > 1e-9) {
            throw Error(ErrorKind::validation, "uniform profile entries must equal 1/n_heads");
        }
        v = uniform;
    }

    validate(bank);
    return bank;
}

}  // namespace headrouter
