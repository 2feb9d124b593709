#include "stoc/bench/sweep.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run_plan(const stoc::bench::SweepPlan& plan, const stoc::bench::SweepOptions& opts) {
    if (plan.empty()) return 0;
    std::cout << stoc::bench::csv_header() << '\n';
    const auto rows = stoc::bench::run_sweep(plan, opts, &std::cout);
    for (const auto& r : rows)
        if (r.stop_reason == "error") return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time vs semi-discrete projected gradient benchmarks"};
    app.require_subcommand(1);

    std::string csv;
    std::size_t threads = 1;
    bool no_timing = false;
    app.add_option("--csv", csv, "Append result rows to this CSV file");
    app.add_option("--threads", threads, "Worker threads (only used with --no-timing)")->check(CLI::PositiveNumber);
    app.add_flag("--no-timing", no_timing, "Allow parallel runs; wall times are then not comparable");

    auto* run_cmd = app.add_subcommand("run", "Run the sweep described by a configuration file");
    std::string config_path;
    run_cmd->add_option("config", config_path, "Configuration file")->required();

    auto* t2 = app.add_subcommand("table2", "Case 1 objective values for four discretizations, both methods");
    auto* t3 = app.add_subcommand("table3", "Case 2 (eps = 1e-3) cheap space-time vs fine semi-discrete runs");

    auto* dump = app.add_subcommand("dump", "Run one configuration and write its final fields");
    std::string run_id;
    std::string out_dir;
    dump->add_option("run-id", run_id, "<case>/<method>/<n_h>/<K>, e.g. case2/space-time/129/64")->required();
    dump->add_option("dir", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    stoc::bench::SweepOptions opts;
    opts.csv = csv;
    opts.threads = threads;
    opts.timing = !no_timing;

    try {
        if (*run_cmd) {
            std::vector<std::string> warnings;
            const auto plan = stoc::bench::load_config(config_path, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            return run_plan(plan, opts);
        }
        if (*t2) return run_plan(stoc::bench::table2_plan(), opts);
        if (*t3) return run_plan(stoc::bench::table3_plan(), opts);
        if (*dump) {
            const auto spec = stoc::bench::parse_run_id(run_id);
            const auto outcome = stoc::bench::execute(spec);
            if (!outcome.error.empty()) {
                std::cerr << "error: " << outcome.error << '\n';
                return 2;
            }
            stoc::bench::dump_fields(outcome, out_dir);
            if (!csv.empty()) stoc::bench::CsvSink(csv).append(outcome.row);
            std::cout << stoc::bench::csv_header() << '\n' << stoc::bench::format_row(outcome.row) << '\n';
            return 0;
        }
    } catch (const stoc::bench::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
