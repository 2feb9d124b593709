#pragma once

#include "stoc/bench/plan.hpp"

#include <filesystem>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

namespace stoc::bench {

struct BenchRow {
    std::string case_name;
    std::string method;
    std::size_t dim = 0;
    std::size_t n_h = 0;
    std::size_t K = 0;
    double J_final = 0;
    double misfit_term = 0;
    double reg_term = 0;
    std::size_t iterations = 0;
    std::string stop_reason;
    double wall_time_seconds = 0;
    double projected_gradient_norm = 0;
};

/// Column names, in order.
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string format_row(const BenchRow& row);
BenchRow parse_row(const std::string& line);
std::vector<BenchRow> read_csv(const std::filesystem::path& path);

/// Appends rows to a CSV file; one locked write per row.
class CsvSink {
public:
    explicit CsvSink(std::filesystem::path path);
    void append(const BenchRow& row);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

/// Result of one optimizer run together with the data it was run on.
struct RunOutcome {
    RunSpec spec;
    BenchRow row;
    std::unique_ptr<DiscreteProblem<double>> problem;
    RunRecord<double> record;
    std::string error;  ///< set when stop_reason is "error"
};

/// Assemble, run the optimizer with the requested backend and summarize.
/// Failures are reported in-row (stop_reason = "error").
RunOutcome execute(const RunSpec& run);

struct SweepOptions {
    std::filesystem::path csv;  ///< empty: no file output
    std::size_t threads = 1;
    bool timing = true;  ///< timing forces sequential execution
};

std::vector<BenchRow> run_sweep(const SweepPlan& plan, const SweepOptions& options,
                                std::ostream* log = nullptr);

/// Write per-slice text files and a manifest for a completed run.
void dump_fields(const RunOutcome& outcome, const std::filesystem::path& dir);

}  // namespace stoc::bench
