// headrouter command-line tool: synthetic workloads, calibration, pruning
// runs, method comparisons, and the routing-overhead benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "headrouter/baselines.hpp"
#include "headrouter/calibration.hpp"
#include "headrouter/errors.hpp"
#include "headrouter/report.hpp"
#include "headrouter/rng.hpp"
#include "headrouter/synth.hpp"

namespace hr = headrouter;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitInvariantError = 3;

std::uint64_t elapsed_ns(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

void hash_bundle_dir(const std::filesystem::path& dir,
                     std::map<std::string, std::string>& hashes) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        hashes[dir.filename().string() + "/" + f.filename().string()] = hr::hash_file(f);
    }
}

std::vector<std::filesystem::path> list_bundle_dirs(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory() &&
            std::filesystem::exists(entry.path() / "manifest.json")) {
            dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) {
        throw hr::Error(hr::ErrorKind::io, "no bundle directories under " + root.string());
    }
    return dirs;
}

struct CommonPruneFlags {
    double ratio = 0.3;
    std::uint64_t seed = 0;
    double prefilter_keep = -1.0;  // <0 means "auto"
    std::string routing = "soft";
    bool probe_first = false;
    int threads = 0;

    hr::PruneConfig to_config() const {
        hr::PruneConfig cfg;
        cfg.ratio = ratio;
        cfg.seed = seed;
        if (prefilter_keep >= 0.0) cfg.prefilter_keep = prefilter_keep;
        cfg.routing = hr::parse_routing_mode(routing);
        cfg.probe_before_prefilter = probe_first;
        return cfg;
    }

    void echo(std::map<std::string, std::string>& config) const {
        config["ratio"] = std::to_string(ratio);
        config["seed"] = std::to_string(seed);
        config["prefilter_keep"] =
            prefilter_keep >= 0.0 ? std::to_string(prefilter_keep) : "auto";
        config["routing"] = routing;
        config["probe_before_prefilter"] = probe_first ? "true" : "false";
        config["threads"] = std::to_string(threads);
        config["pruning_layer"] = std::to_string(hr::PruneConfig{}.pruning_layer);
    }
};

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
    std::string category = "semantic";
    std::size_t count = 10;
    std::uint64_t seed = 0;
    hr::GeneratorSpec spec;
    std::string out;
};

int cmd_synth(const SynthArgs& args) {
    hr::GeneratorSpec spec = args.spec;
    spec.category = hr::parse_category(args.category);

    const std::filesystem::path out_dir(args.out);
    std::filesystem::create_directories(out_dir);

    // Merge into an existing labels table so categories can share a directory.
    json labels = json::object();
    if (std::ifstream existing(out_dir / "labels.json"); existing) {
        try {
            existing >> labels;
        } catch (const json::exception&) {
            labels = json::object();
        }
    }
    std::uint64_t state = args.seed;
    for (std::size_t i = 0; i < args.count; ++i) {
        spec.seed = hr::rng::splitmix64(state);
        const hr::SampleBundle bundle = hr::generate(spec);
        hr::save_bundle(out_dir / bundle.sample_id, bundle);
        labels[bundle.sample_id] = hr::category_name(spec.category);
        std::cout << "wrote " << (out_dir / bundle.sample_id).string() << "\n";
    }

    std::ofstream labels_out(out_dir / "labels.json", std::ios::trunc);
    if (!labels_out) {
        throw hr::Error(hr::ErrorKind::io, "cannot write labels in " + args.out);
    }
    labels_out << labels.dump(2) << '\n';
    std::cout << args.count << " bundle(s) in " << args.out << "\n";
    return 0;
}

// ---- calibrate ------------------------------------------------------------

int cmd_calibrate(const std::string& in_dir, std::string labels_path, const std::string& out,
                  int threads) {
    if (labels_path.empty()) labels_path = (std::filesystem::path(in_dir) / "labels.json").string();
    std::ifstream labels_in(labels_path);
    if (!labels_in) {
        throw hr::Error(hr::ErrorKind::io, "cannot open labels file: " + labels_path);
    }
    json labels;
    try {
        labels_in >> labels;
    } catch (const json::exception& e) {
        throw hr::Error(hr::ErrorKind::validation,
                        "malformed labels file " + labels_path + ": " + e.what());
    }

    hr::CalibrationSet set;
    for (const auto& [sample_id, category] : labels.items()) {
        hr::LabeledBundle sample;
        sample.bundle = hr::load_bundle(std::filesystem::path(in_dir) / sample_id);
        sample.category = hr::parse_category(category.get<std::string>());
        set.samples.push_back(std::move(sample));
    }

    const hr::ProfileBank bank = hr::calibrate(set, threads);
    hr::save_profile_bank(out, bank);
    std::cout << "calibrated bank from " << set.samples.size() << " samples: centers ("
              << bank.mu_sem << ", " << bank.mu_uni << ", " << bank.mu_aco << "), bandwidth "
              << bank.sigma_g << " -> " << out << "\n";
    return 0;
}

// ---- prune ----------------------------------------------------------------

int cmd_prune(const std::string& in_bundle, const std::string& bank_path,
              const std::string& method_name, const CommonPruneFlags& flags,
              const std::string& out) {
    const auto start = Clock::now();
    const hr::Method method = hr::parse_method(method_name);
    const hr::SampleBundle bundle = hr::load_bundle(in_bundle);

    hr::ProfileBank bank;
    const bool needs_bank =
        method == hr::Method::headrouter || method == hr::Method::headrouter_hard;
    if (needs_bank) {
        if (bank_path.empty()) {
            throw hr::Error(hr::ErrorKind::config, "--bank is required for headrouter methods");
        }
        bank = hr::load_profile_bank(bank_path);
    }

    const hr::PruneConfig cfg = flags.to_config();
    const hr::PruneResult result =
        hr::run_method(bundle, needs_bank ? &bank : nullptr, method, cfg, flags.threads);

    hr::PruneReport report = hr::make_report(bundle, method, cfg, result);
    report.manifest.version = hr::tool_version();
    report.manifest.command = "prune";
    flags.echo(report.manifest.config);
    report.manifest.config["method"] = method_name;
    report.manifest.config["in"] = in_bundle;
    hash_bundle_dir(in_bundle, report.manifest.input_hashes);
    if (needs_bank) report.manifest.input_hashes["bank"] = hr::hash_file(bank_path);
    report.manifest.wall_ns = elapsed_ns(start);

    hr::write_prune_report(out, report);
    std::cout << "method " << report.method << " retained " << report.retained.size() << "/"
              << bundle.n_audio() << " tokens -> " << out << "\n";
    return 0;
}

// ---- compare ----------------------------------------------------------------

struct Aggregate {
    std::size_t n = 0;
    double overlap_sum = 0.0;
    std::size_t overlap_n = 0;
    std::array<double, 3> alpha_sum{0.0, 0.0, 0.0};
    std::size_t alpha_n = 0;
    hr::StageTimings sums;

    void add(const hr::PruneResult& result, std::optional<double> oracle_overlap) {
        ++n;
        if (oracle_overlap) {
            overlap_sum += *oracle_overlap;
            ++overlap_n;
        }
        if (result.decision) {
            for (int c = 0; c < 3; ++c) {
                alpha_sum[static_cast<std::size_t>(c)] +=
                    result.decision->alphas[static_cast<std::size_t>(c)];
            }
            ++alpha_n;
        }
        sums.prefilter_ns += result.timings.prefilter_ns;
        sums.probe_ns += result.timings.probe_ns;
        sums.routing_ns += result.timings.routing_ns;
        sums.scoring_ns += result.timings.scoring_ns;
        sums.selection_ns += result.timings.selection_ns;
    }
};

int cmd_compare(const std::string& in_dir, const std::string& bank_path,
                const std::string& methods_csv, const std::string& ratios_csv,
                const CommonPruneFlags& flags, const std::string& out_prefix) {
    const auto start = Clock::now();

    std::vector<hr::Method> methods;
    {
        std::istringstream ss(methods_csv);
        std::string tag;
        while (std::getline(ss, tag, ',')) {
            if (!tag.empty()) methods.push_back(hr::parse_method(tag));
        }
    }
    std::vector<double> ratios;
    {
        std::istringstream ss(ratios_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            try {
                std::size_t used = 0;
                const double r = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
                ratios.push_back(r);
            } catch (const std::exception&) {
                throw hr::Error(hr::ErrorKind::config, "bad ratio value: " + item);
            }
        }
    }
    if (methods.empty() || ratios.empty()) {
        throw hr::Error(hr::ErrorKind::config, "compare needs at least one method and ratio");
    }

    const bool needs_bank = std::any_of(methods.begin(), methods.end(), [](hr::Method m) {
        return m == hr::Method::headrouter || m == hr::Method::headrouter_hard;
    });
    hr::ProfileBank bank;
    if (needs_bank) {
        if (bank_path.empty()) {
            throw hr::Error(hr::ErrorKind::config, "--bank is required for headrouter methods");
        }
        bank = hr::load_profile_bank(bank_path);
    }

    std::map<std::string, std::string> input_hashes;
    if (needs_bank) input_hashes["bank"] = hr::hash_file(bank_path);

    // (method, ratio, category) -> aggregate; category "all" collects everything.
    std::map<std::tuple<std::string, double, std::string>, Aggregate> table;
    const auto dirs = list_bundle_dirs(in_dir);
    for (const auto& dir : dirs) {
        const hr::SampleBundle bundle = hr::load_bundle(dir);
        hash_bundle_dir(dir, input_hashes);
        const std::string category =
            bundle.category ? hr::category_name(*bundle.category) : "unlabeled";
        for (double ratio : ratios) {
            const std::size_t k = hr::budget(bundle.n_audio(), ratio);
            std::optional<std::vector<std::size_t>> oracle;
            if (bundle.energy) oracle = hr::oracle_select(bundle.energy->data, k);
            for (hr::Method method : methods) {
                hr::PruneConfig cfg = flags.to_config();
                cfg.ratio = ratio;
                const hr::PruneResult result =
                    hr::run_method(bundle, needs_bank ? &bank : nullptr, method, cfg,
                                   flags.threads);
                std::optional<double> oracle_overlap;
                if (oracle) oracle_overlap = hr::overlap(result.retained, *oracle);
                table[{hr::method_tag(method), ratio, category}].add(result, oracle_overlap);
                table[{hr::method_tag(method), ratio, "all"}].add(result, oracle_overlap);
            }
        }
    }

    json manifest = {
        {"tool", "headrouter"},
        {"version", hr::tool_version()},
        {"command", "compare"},
        {"config",
         {{"in", in_dir},
          {"methods", methods_csv},
          {"ratios", ratios_csv},
          {"routing", flags.routing},
          {"seed", std::to_string(flags.seed)},
          {"prefilter_keep",
           flags.prefilter_keep >= 0.0 ? std::to_string(flags.prefilter_keep) : "auto"},
          {"threads", std::to_string(flags.threads)}}},
        {"input_hashes", input_hashes},
    };

    json rows = json::array();
    std::ostringstream csv;
    csv << "method,ratio,category,n_samples,oracle_overlap_mean,alpha_semantic_mean,"
           "alpha_uniform_mean,alpha_acoustic_mean,prefilter_ns_mean,probe_ns_mean,"
           "routing_ns_mean,scoring_ns_mean,selection_ns_mean,total_ns_mean\n";
    for (const auto& [key, agg] : table) {
        const auto& [method, ratio, category] = key;
        const double n = static_cast<double>(agg.n);
        json row = {
            {"method", method},
            {"ratio", ratio},
            {"category", category},
            {"n_samples", agg.n},
            {"timings_ns_mean",
             {{"prefilter", static_cast<double>(agg.sums.prefilter_ns) / n},
              {"probe", static_cast<double>(agg.sums.probe_ns) / n},
              {"routing", static_cast<double>(agg.sums.routing_ns) / n},
              {"scoring", static_cast<double>(agg.sums.scoring_ns) / n},
              {"selection", static_cast<double>(agg.sums.selection_ns) / n},
              {"total", static_cast<double>(agg.sums.total_ns()) / n}}},
        };
        csv << method << ',' << ratio << ',' << category << ',' << agg.n << ',';
        if (agg.overlap_n > 0) {
            const double mean = agg.overlap_sum / static_cast<double>(agg.overlap_n);
            row["oracle_overlap_mean"] = mean;
            csv << mean;
        }
        csv << ',';
        if (agg.alpha_n > 0) {
            json alphas = json::object();
            const char* names[3] = {"semantic", "uniform", "acoustic"};
            for (int c = 0; c < 3; ++c) {
                const double mean =
                    agg.alpha_sum[static_cast<std::size_t>(c)] / static_cast<double>(agg.alpha_n);
                alphas[names[static_cast<std::size_t>(c)]] = mean;
                csv << mean;
                if (c < 2) csv << ',';
            }
            row["alphas_mean"] = std::move(alphas);
        } else {
            csv << ",,";
        }
        csv << ',' << static_cast<double>(agg.sums.prefilter_ns) / n << ','
            << static_cast<double>(agg.sums.probe_ns) / n << ','
            << static_cast<double>(agg.sums.routing_ns) / n << ','
            << static_cast<double>(agg.sums.scoring_ns) / n << ','
            << static_cast<double>(agg.sums.selection_ns) / n << ','
            << static_cast<double>(agg.sums.total_ns()) / n << '\n';
        rows.push_back(std::move(row));
    }

    manifest["wall_ns"] = elapsed_ns(start);
    json doc = {{"manifest", std::move(manifest)}, {"rows", std::move(rows)}};

    {
        std::ofstream out(out_prefix + ".json", std::ios::trunc);
        if (!out) throw hr::Error(hr::ErrorKind::io, "cannot write " + out_prefix + ".json");
        out << doc.dump(2) << '\n';
    }
    {
        std::ofstream out(out_prefix + ".csv", std::ios::trunc);
        if (!out) throw hr::Error(hr::ErrorKind::io, "cannot write " + out_prefix + ".csv");
        out << csv.str();
    }
    std::cout << "compared " << methods.size() << " method(s) x " << ratios.size()
              << " ratio(s) over " << dirs.size() << " bundle(s) -> " << out_prefix
              << ".{csv,json}\n";
    return 0;
}

// ---- bench ----------------------------------------------------------------

int cmd_bench(std::size_t n_audio, std::size_t n_text, std::size_t n_heads, std::size_t d,
              std::size_t d_k, int repeats, double ratio, std::uint64_t seed, int threads,
              const std::string& out) {
    if (repeats < 1) throw hr::Error(hr::ErrorKind::config, "--repeats must be at least 1");

    hr::GeneratorSpec spec;
    spec.category = hr::Category::mixed;
    spec.n_audio = n_audio;
    spec.n_text = n_text;
    spec.n_heads = n_heads;
    spec.d = d;
    spec.d_k = d_k;
    spec.seed = seed;
    const hr::SampleBundle bundle = hr::generate(spec);

    // The bank contents do not affect routing cost; any valid bank will do.
    hr::ProfileBank bank;
    bank.n_heads = n_heads;
    bank.w_sem.assign(n_heads, 1.0 / static_cast<double>(n_heads));
    bank.w_uni.assign(n_heads, 1.0 / static_cast<double>(n_heads));
    bank.w_aco.assign(n_heads, 1.0 / static_cast<double>(n_heads));
    bank.mu_sem = 0.10;
    bank.mu_uni = 0.20;
    bank.mu_aco = 0.30;
    bank.sigma_g = 0.05;

    hr::PruneConfig cfg;
    cfg.ratio = ratio;
    cfg.prefilter_keep = 1.0;  // time the full probe

    std::vector<hr::StageTimings> runs;
    for (int i = 0; i < repeats; ++i) {
        runs.push_back(hr::run_pipeline(bundle, bank, cfg, threads).timings);
    }

    auto median_of = [&](auto getter) {
        std::vector<std::uint64_t> values;
        values.reserve(runs.size());
        for (const auto& r : runs) values.push_back(getter(r));
        std::sort(values.begin(), values.end());
        return values[values.size() / 2];
    };
    const std::uint64_t probe = median_of([](const auto& r) { return r.probe_ns; });
    const std::uint64_t routing = median_of([](const auto& r) { return r.routing_ns; });
    const std::uint64_t scoring = median_of([](const auto& r) { return r.scoring_ns; });
    const std::uint64_t selection = median_of([](const auto& r) { return r.selection_ns; });
    const std::uint64_t total = median_of([](const auto& r) { return r.total_ns(); });
    const double routing_fraction =
        static_cast<double>(routing) / static_cast<double>(total);

    std::cout << "bench n_audio=" << n_audio << " n_text=" << n_text << " n_heads=" << n_heads
              << " d=" << d << " d_k=" << d_k << " repeats=" << repeats << "\n"
              << "  probe     " << probe / 1e6 << " ms (median)\n"
              << "  routing   " << routing / 1e6 << " ms (median)\n"
              << "  scoring   " << scoring / 1e6 << " ms (median)\n"
              << "  selection " << selection / 1e6 << " ms (median)\n"
              << "  total     " << total / 1e6 << " ms (median)\n"
              << "  routing fraction " << routing_fraction * 100.0 << " %\n";

    if (!out.empty()) {
        json doc = {
            {"manifest",
             {{"tool", "headrouter"},
              {"version", hr::tool_version()},
              {"command", "bench"},
              {"config",
               {{"n_audio", std::to_string(n_audio)},
                {"n_text", std::to_string(n_text)},
                {"n_heads", std::to_string(n_heads)},
                {"d", std::to_string(d)},
                {"d_k", std::to_string(d_k)},
                {"repeats", std::to_string(repeats)},
                {"ratio", std::to_string(ratio)},
                {"seed", std::to_string(seed)},
                {"threads", std::to_string(threads)}}}}},
            {"median_ns",
             {{"probe", probe},
              {"routing", routing},
              {"scoring", scoring},
              {"selection", selection},
              {"total", total}}},
            {"routing_fraction", routing_fraction},
        };
        std::ofstream f(out, std::ios::trunc);
        if (!f) throw hr::Error(hr::ErrorKind::io, "cannot write " + out);
        f << doc.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"head-aware audio token pruning toolkit"};
    app.require_subcommand(1);

    // synth
    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate synthetic sample bundles");
    synth->add_option("--category", synth_args.category, "semantic | acoustic | mixed");
    synth->add_option("--n", synth_args.count, "number of bundles")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_args.seed, "base seed");
    synth->add_option("--n-audio", synth_args.spec.n_audio, "audio tokens per bundle");
    synth->add_option("--n-text", synth_args.spec.n_text, "text tokens per bundle");
    synth->add_option("--n-heads", synth_args.spec.n_heads, "attention heads");
    synth->add_option("--d", synth_args.spec.d, "embedding width");
    synth->add_option("--dk", synth_args.spec.d_k, "per-head projection width");
    synth->add_option("--oracle-fraction", synth_args.spec.oracle_fraction,
                      "fraction of high-energy tokens");
    synth->add_option("--conc-low", synth_args.spec.concentration_low,
                      "Dirichlet concentration of diffuse mass");
    synth->add_option("--conc-high", synth_args.spec.concentration_high,
                      "Dirichlet concentration of peaked mass");
    synth->add_option("--frac-selective", synth_args.spec.fraction_selective_heads,
                      "fraction of selective heads (acoustic/mixed)");
    synth->add_option("--out", synth_args.out, "output directory")->required();

    // calibrate
    std::string cal_in, cal_labels, cal_out;
    int cal_threads = 0;
    auto* calibrate = app.add_subcommand("calibrate", "estimate a profile bank");
    calibrate->add_option("--in", cal_in, "directory of bundles")->required();
    calibrate->add_option("--labels", cal_labels, "labels file (default <in>/labels.json)");
    calibrate->add_option("--out", cal_out, "output bank file")->required();
    calibrate->add_option("--threads", cal_threads, "probe thread cap");

    // prune
    std::string prune_in, prune_bank, prune_method = "headrouter", prune_out;
    CommonPruneFlags prune_flags;
    auto* prune = app.add_subcommand("prune", "prune one bundle and write a report");
    prune->add_option("--in", prune_in, "bundle directory")->required();
    prune->add_option("--bank", prune_bank, "profile bank file");
    prune->add_option("--ratio", prune_flags.ratio, "pruning ratio in [0, 1)");
    prune->add_option("--method", prune_method,
                      "headrouter | headrouter-hard | fastv | fastv-lastrow | frame | random | oracle");
    prune->add_option("--seed", prune_flags.seed, "run seed for stochastic methods");
    prune->add_option("--prefilter-keep", prune_flags.prefilter_keep,
                      "frame pre-filter keep fraction in (0, 1]; default min(1, 2(1-r))");
    prune->add_option("--routing", prune_flags.routing, "soft | hard | uniform");
    prune->add_flag("--probe-first", prune_flags.probe_first,
                    "probe every token before the pre-filter");
    prune->add_option("--threads", prune_flags.threads, "probe thread cap");
    prune->add_option("--out", prune_out, "output report file")->required();

    // compare
    std::string cmp_in, cmp_bank, cmp_methods = "headrouter,fastv,frame,random",
                cmp_ratios = "0.3,0.6,0.9", cmp_prefix;
    CommonPruneFlags cmp_flags;
    auto* compare = app.add_subcommand("compare", "run methods x ratios over a bundle set");
    compare->add_option("--in", cmp_in, "directory of bundles")->required();
    compare->add_option("--bank", cmp_bank, "profile bank file");
    compare->add_option("--methods", cmp_methods, "comma-separated method tags");
    compare->add_option("--ratios", cmp_ratios, "comma-separated pruning ratios");
    compare->add_option("--seed", cmp_flags.seed, "run seed for stochastic methods");
    compare->add_option("--prefilter-keep", cmp_flags.prefilter_keep,
                        "frame pre-filter keep fraction");
    compare->add_option("--routing", cmp_flags.routing, "soft | hard | uniform");
    compare->add_option("--threads", cmp_flags.threads, "probe thread cap");
    compare->add_option("--out-prefix", cmp_prefix, "output prefix for .csv/.json")->required();

    // bench
    std::size_t bench_n_audio = 9000, bench_n_text = 64, bench_n_heads = 16, bench_d = 2048,
                bench_dk = 128;
    int bench_repeats = 20, bench_threads = 0;
    double bench_ratio = 0.3;
    std::uint64_t bench_seed = 0;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "measure routing overhead");
    bench->add_option("--n-audio", bench_n_audio)->check(CLI::PositiveNumber);
    bench->add_option("--n-text", bench_n_text)->check(CLI::PositiveNumber);
    bench->add_option("--n-heads", bench_n_heads)->check(CLI::PositiveNumber);
    bench->add_option("--d", bench_d)->check(CLI::PositiveNumber);
    bench->add_option("--dk", bench_dk)->check(CLI::PositiveNumber);
    bench->add_option("--repeats", bench_repeats)->check(CLI::PositiveNumber);
    bench->add_option("--ratio", bench_ratio);
    bench->add_option("--seed", bench_seed);
    bench->add_option("--threads", bench_threads, "probe thread cap");
    bench->add_option("--out", bench_out, "optional JSON report path");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (calibrate->parsed()) return cmd_calibrate(cal_in, cal_labels, cal_out, cal_threads);
        if (prune->parsed()) {
            return cmd_prune(prune_in, prune_bank, prune_method, prune_flags, prune_out);
        }
        if (compare->parsed()) {
            return cmd_compare(cmp_in, cmp_bank, cmp_methods, cmp_ratios, cmp_flags, cmp_prefix);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_n_audio, bench_n_text, bench_n_heads, bench_d, bench_dk,
                             bench_repeats, bench_ratio, bench_seed, bench_threads, bench_out);
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInputError;
    } catch (const hr::Error& e) {
        std::cerr << "error [" << hr::error_kind_name(e.kind()) << "]: " << e.what() << "\n";
        switch (e.kind()) {
            case hr::ErrorKind::validation:
            case hr::ErrorKind::non_finite:
                return kExitInvariantError;
            default:
                return kExitInputError;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
