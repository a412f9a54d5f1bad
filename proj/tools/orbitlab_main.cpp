#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbitlab/scenario.hpp"

namespace fs = std::filesystem;
using orbitlab::scenario::ordered_json;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> dim;
    std::optional<std::size_t> depth;
    std::optional<std::string> gs_variant;
    std::optional<std::string> reorthogonalize;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "Override the scenario seed");
    cmd->add_option("--dim", ov.dim, "Override the ambient dimension");
    cmd->add_option("--depth", ov.depth, "Override the orbit depth");
    cmd->add_option("--gs-variant", ov.gs_variant, "Gram-Schmidt variant")
        ->check(CLI::IsMember({"classical", "modified"}));
    cmd->add_option("--reorthogonalize", ov.reorthogonalize, "Second projection pass on norm drop")
        ->check(CLI::IsMember({"on", "off"}));
}

void apply_overrides(ordered_json& j, const Overrides& ov) {
    if (ov.seed) j["seed"] = *ov.seed;
    if (ov.dim) j["dim"] = *ov.dim;
    if (ov.depth) j["depth"] = *ov.depth;
    if (ov.gs_variant) j["gs"]["variant"] = *ov.gs_variant;
    if (ov.reorthogonalize) j["gs"]["reorthogonalize"] = (*ov.reorthogonalize == "on");
}

ordered_json load_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw orbitlab::InvalidInput("cannot open file: " + file.string());
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw orbitlab::InvalidInput("JSON parse error in " + file.string() + ": " + e.what());
    }
}

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("ORBITLAB_OUT_DIR"); env && *env) return env;
    return ".";
}

orbitlab::scenario::ScenarioConfig load_with_overrides(const fs::path& file, const Overrides& ov) {
    ordered_json j = load_json_file(file);
    apply_overrides(j, ov);
    return orbitlab::scenario::config_from_json(j);
}

int cmd_run(const fs::path& config_path, const Overrides& ov, const std::string& out_flag) {
    const auto cfg = load_with_overrides(config_path, ov);
    const auto rep = orbitlab::scenario::run_scenario(cfg);
    const fs::path out = resolve_out_dir(out_flag);
    const fs::path file = orbitlab::scenario::write_report_file(rep, out);
    std::cout << rep.name << ": verdict=" << rep.body.at("verdict").get<std::string>()
              << " theta_count=" << rep.body.at("chain").at("theta_count").get<std::size_t>()
              << " defect=" << rep.body.at("cyclicity").at("defect").get<double>() << "\n"
              << "report: " << file.string() << "\n";
    return 0;
}

int cmd_batch(const fs::path& dir, const Overrides& ov, const std::string& out_flag,
              unsigned parallelism) {
    if (!fs::is_directory(dir))
        throw orbitlab::InvalidInput("batch: not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string fname = entry.path().filename().string();
        if (entry.path().extension() == ".json" && !fname.ends_with(".report.json"))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<orbitlab::scenario::ScenarioConfig> configs;
    configs.reserve(files.size());
    for (const auto& f : files) configs.push_back(load_with_overrides(f, ov));

    const auto reports = orbitlab::scenario::run_batch(configs, parallelism);
    const fs::path out = resolve_out_dir(out_flag);

    ordered_json index;
    index["scenarios"] = ordered_json::array();
    int exit_code = 0;
    for (const auto& rep : reports) {
        ordered_json row;
        row["name"] = rep.name;
        if (rep.ok()) {
            const fs::path file = orbitlab::scenario::write_report_file(rep, out);
            row["status"] = "ok";
            row["exit_code"] = 0;
            row["report_file"] = file.filename().string();
            row["verdict"] = rep.body.at("verdict");
            std::cout << rep.name << ": ok verdict=" << rep.body.at("verdict").get<std::string>()
                      << "\n";
        } else {
            row["status"] = "error";
            row["exit_code"] = rep.exit_code;
            row["error"] = rep.error;
            std::cout << rep.name << ": error (" << rep.exit_code << "): " << rep.error << "\n";
            exit_code = std::max(exit_code, rep.exit_code);
        }
        index["scenarios"].push_back(std::move(row));
    }
    index["count"] = reports.size();

    fs::create_directories(out);
    const fs::path index_file = out / "batch_index.json";
    {
        std::ofstream f(index_file, std::ios::binary | std::ios::trunc);
        f << index.dump(2) << "\n";
        if (!f) throw orbitlab::InvalidInput("cannot write " + index_file.string());
    }
    std::cout << "index: " << index_file.string() << "\n";
    return exit_code;
}

int cmd_plot(const fs::path& report_path, const std::string& out_flag) {
    ordered_json j = load_json_file(report_path);
    const ordered_json& body = j.contains("report") ? j.at("report") : j;
    const auto files = orbitlab::scenario::emit_plot_data(body, resolve_out_dir(out_flag));
    for (const auto& f : files) std::cout << f.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbit orthonormalization and weak-convergence experiment runner"};
    app.set_version_flag("--version", std::string(orbitlab::scenario::kToolVersion));
    app.require_subcommand(1);

    std::string out_flag;
    app.add_option("--out", out_flag,
                   "Output directory (default: $ORBITLAB_OUT_DIR, then current directory)");

    Overrides ov;
    std::string config_path, batch_dir, report_path;
    unsigned parallelism = 1;

    CLI::App* run = app.add_subcommand("run", "Run one scenario config and write its report");
    run->add_option("config", config_path, "Scenario config JSON file")->required();
    add_override_flags(run, ov);

    CLI::App* batch = app.add_subcommand("batch", "Run every scenario config in a directory");
    batch->add_option("dir", batch_dir, "Directory of scenario config JSON files")->required();
    batch->add_option("--parallelism", parallelism, "Worker threads (results are identical)")
        ->check(CLI::PositiveNumber);
    add_override_flags(batch, ov);

    CLI::App* plot = app.add_subcommand("plot", "Emit per-probe CSV series from a report file");
    plot->add_option("report", report_path, "Report JSON file produced by run/batch")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help/--version land here with exit code 0; everything else is a
        // usage error and must map to 1 per the exit-code contract
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, ov, out_flag);
        if (batch->parsed()) return cmd_batch(batch_dir, ov, out_flag, parallelism);
        if (plot->parsed()) return cmd_plot(report_path, out_flag);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return orbitlab::scenario::exit_code_for(e);
    }
    return 0;
}
