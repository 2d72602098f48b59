#include "headrouter/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "headrouter/errors.hpp"
#include "headrouter/rng.hpp"

namespace headrouter {

using nlohmann::json;

const char* tool_version() { return "0.1.0"; }

namespace {

json timings_to_json(const StageTimings& t) {
    return json{
        {"prefilter", t.prefilter_ns}, {"probe", t.probe_ns},       {"routing", t.routing_ns},
        {"scoring", t.scoring_ns},     {"selection", t.selection_ns},
    };
}

StageTimings timings_from_json(const json& j) {
    StageTimings t;
    t.prefilter_ns = j.value("prefilter", 0ull);
    t.probe_ns = j.value("probe", 0ull);
    t.routing_ns = j.value("routing", 0ull);
    t.scoring_ns = j.value("scoring", 0ull);
    t.selection_ns = j.value("selection", 0ull);
    return t;
}

json manifest_to_json(const RunManifest& m) {
    return json{
        {"tool", m.tool},           {"version", m.version},
        {"command", m.command},     {"config", m.config},
        {"input_hashes", m.input_hashes}, {"wall_ns", m.wall_ns},
    };
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.tool = j.value("tool", "");
    m.version = j.value("version", "");
    m.command = j.value("command", "");
    if (j.contains("config")) m.config = j["config"].get<std::map<std::string, std::string>>();
    if (j.contains("input_hashes")) {
        m.input_hashes = j["input_hashes"].get<std::map<std::string, std::string>>();
    }
    m.wall_ns = j.value("wall_ns", 0ull);
    return m;
}

}  // namespace

PruneReport make_report(const SampleBundle& bundle, Method method, const PruneConfig& cfg,
                        const PruneResult& result) {
    PruneReport report;
    report.sample_id = bundle.sample_id;
    report.method = method_tag(method);
    report.ratio = cfg.ratio;
    report.budget_k = result.retained.size();
    report.category = bundle.category;
    report.importance = result.importance;
    report.retained = result.retained;
    report.timings = result.timings;
    if (method == Method::headrouter || method == Method::headrouter_hard) {
        report.routing_mode = routing_mode_name(
            method == Method::headrouter_hard ? RoutingMode::hard : cfg.routing);
        if (result.decision) {
            report.spread = result.decision->stats.spread;
            report.alphas = result.decision->alphas;
        }
    }
    return report;
}

void write_prune_report(const std::filesystem::path& path, const PruneReport& report) {
    json importance = json::array();
    for (float v : report.importance) {
        if (std::isfinite(v)) {
            importance.push_back(v);
        } else {
            importance.push_back(nullptr);  // pre-filtered sentinel
        }
    }

    json doc = {
        {"sample_id", report.sample_id},
        {"method", report.method},
        {"ratio", report.ratio},
        {"budget", report.budget_k},
        {"importance", std::move(importance)},
        {"retained", report.retained},
        {"timings_ns", timings_to_json(report.timings)},
        {"manifest", manifest_to_json(report.manifest)},
    };
    if (report.category) doc["category"] = category_name(*report.category);
    if (report.routing_mode) {
        json routing = {{"mode", *report.routing_mode}};
        if (report.spread) routing["spread"] = *report.spread;
        if (report.alphas) {
            routing["alphas"] = {{"semantic", (*report.alphas)[0]},
                                 {"uniform", (*report.alphas)[1]},
                                 {"acoustic", (*report.alphas)[2]}};
        }
        doc["routing"] = std::move(routing);
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open for writing: " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

PruneReport read_prune_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open report: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, "malformed report " + path.string() + ": " + e.what());
    }

    PruneReport report;
    try {
        report.sample_id = doc.at("sample_id").get<std::string>();
        report.method = doc.at("method").get<std::string>();
        report.ratio = doc.at("ratio").get<double>();
        report.budget_k = doc.at("budget").get<std::size_t>();
        if (doc.contains("category")) {
            report.category = parse_category(doc["category"].get<std::string>());
        }
        for (const auto& v : doc.at("importance")) {
            report.importance.push_back(v.is_null()
                                            ? -std::numeric_limits<float>::infinity()
                                            : v.get<float>());
        }
        report.retained = doc.at("retained").get<std::vector<std::size_t>>();
        report.timings = timings_from_json(doc.at("timings_ns"));
        report.manifest = manifest_from_json(doc.at("manifest"));
        if (doc.contains("routing")) {
            const auto& routing = doc["routing"];
            report.routing_mode = routing.at("mode").get<std::string>();
            if (routing.contains("spread")) report.spread = routing["spread"].get<double>();
            if (routing.contains("alphas")) {
                report.alphas = std::array<double, 3>{
                    routing["alphas"].at("semantic").get<double>(),
                    routing["alphas"].at("uniform").get<double>(),
                    routing["alphas"].at("acoustic").get<double>(),
                };
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, "malformed report " + path.string() + ": " + e.what());
    }

    // Retained-set invariants.
    if (report.retained.size() != report.budget_k) {
        throw Error(ErrorKind::validation, "report retained size disagrees with its budget");
    }
    const std::size_t n = report.importance.size();
    for (std::size_t i = 0; i < report.retained.size(); ++i) {
        if (report.retained[i] >= n || (i > 0 && report.retained[i] <= report.retained[i - 1])) {
            throw Error(ErrorKind::validation,
                        "report retained indices must be strictly increasing and in range");
        }
    }
    return report;
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot hash: " + path.string());
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace headrouter
