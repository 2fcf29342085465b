#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bonnc/runner.hpp"

namespace {

std::vector<uint64_t> parse_seed_list(const std::string& text) {
    std::vector<uint64_t> seeds;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) seeds.push_back(std::stoull(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return seeds;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) grid.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return grid;
}

void print_summary(const bonnc::RunReport& report) {
    std::cout << "mode=" << bonnc::to_string(report.mode) << "  seeds=" << report.seeds.size()
              << "  mean test accuracy=" << report.mean_test_accuracy
              << "  std=" << report.std_test_accuracy << "\n";
    for (const auto& s : report.seeds)
        if (!s.ok) std::cout << "  seed " << s.seed << " failed: " << s.error << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy node classification by bi-level multi-teacher distillation"};
    app.require_subcommand(1);

    std::string config_path, mode_override, seeds_override, out_dir = "out";
    std::string sweep_param, sweep_grid;

    auto* run = app.add_subcommand("run", "run an experiment over the configured seeds");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--mode", mode_override, "override the configured mode");
    run->add_option("--seeds", seeds_override, "comma-separated seed list override");
    run->add_option("--out", out_dir, "output directory for the report files");

    auto* sweep = app.add_subcommand("sweep", "run the experiment over a parameter grid");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--param", sweep_param, "parameter to sweep")->required();
    sweep->add_option("--grid", sweep_grid, "comma-separated values")->required();
    sweep->add_option("--seeds", seeds_override, "comma-separated seed list override");
    sweep->add_option("--out", out_dir, "output directory for sweep.csv");

    auto* validate = app.add_subcommand("validate", "parse and range-check a config file");
    validate->add_option("--config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        bonnc::RunConfig cfg = bonnc::load_config(config_path);
        if (!mode_override.empty()) cfg.mode = bonnc::parse_mode(mode_override);
        if (!seeds_override.empty()) cfg.seeds = parse_seed_list(seeds_override);
        cfg.validate();

        if (validate->parsed()) {
            std::cout << "config ok: mode=" << bonnc::to_string(cfg.mode)
                      << " seeds=" << cfg.seeds.size() << "\n";
            return 0;
        }

        if (run->parsed()) {
            const bonnc::RunReport report = bonnc::run_experiment(cfg);
            bonnc::emit_report(report, out_dir);
            print_summary(report);
            return report.all_ok() ? 0 : 1;
        }

        // sweep
        const bonnc::SweepResult result = bonnc::run_sweep(cfg, sweep_param, parse_grid(sweep_grid));
        bonnc::emit_sweep(result, out_dir);
        bool ok = true;
        for (const auto& row : result.rows) {
            std::cout << sweep_param << "=" << row.value << "  ";
            print_summary(row.report);
            ok = ok && row.report.all_ok();
        }
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
