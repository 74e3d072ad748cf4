#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "degcausal/config.hpp"
#include "degcausal/error.hpp"
#include "degcausal/io.hpp"

using namespace degcausal;

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery experiments on multivariate degradation data"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = -1;
    app.add_option("--config", config_path, "JSON run configuration (or a manifest.json to rerun)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "experiment seed");
    app.add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "simulate degradation paths from a system spec"},
        {"discover", "run discovery methods on one dataset"},
        {"benchmark", "exact match rates over sample size and replications"},
        {"sweep", "benchmark across the levels of one model factor"},
        {"filter-case", "band-pass filter degradation case"},
        {"cmapss", "turbofan case: windows, bootstrap, majority vote"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            const auto raw = nlohmann::json::parse(read_text_file(config_path), nullptr, false);
            const auto& body = raw.is_object() && raw.contains("manifest_version") ? raw["config"] : raw;
            if (body.is_object() && body.contains("kind") && body["kind"] != command)
                throw Error(ErrorKind::Config, "kind: config declares '" + body["kind"].dump() + "' but the command is '" +
                                                   command + "'");
            j = load_config(config_path).to_json();
        }
        j["kind"] = command;
        if (app.count("--seed")) j["seed"] = seed;
        if (app.count("--jobs")) j["jobs"] = jobs;
        if (app.count("--out")) j["output"] = out_dir;
        cfg = parse_config(j);
    } catch (const Error& e) {
        const nlohmann::json report{{"kind", to_string(e.kind())}, {"message", e.what()}};
        std::cerr << report.dump() << "\n";
        return e.kind() == ErrorKind::Config ? 2 : 1;
    }
    return run_command(cfg, std::cerr);
}
