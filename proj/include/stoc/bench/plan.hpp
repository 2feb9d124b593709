#pragma once

#include "stoc/bench/cases.hpp"
#include "stoc/pgm.hpp"
#include "stoc/semidiscrete.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace stoc::bench {

enum class Method { space_time, semi_discrete };

const char* to_string(Method m);
Method parse_method(const std::string& s);

struct RunSpec {
    CaseSpec spec;
    std::size_t n_cells = 0;  ///< cells per axis
    std::size_t K = 0;
    Method method = Method::space_time;
    PgmConfig<double> config;
    AdjointSampling sampling = AdjointSampling::right_endpoint;

    std::size_t n_h() const;
    /// "<case>/<method>/<n_h>/<K>", the form accepted by `bench dump`.
    std::string id() const;
};

using SweepPlan = std::vector<RunSpec>;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parse the line-oriented `key = value` format with `[run]` sections.
///
/// Keys before the first section, or inside `[defaults]`, apply to every later
/// run block. `n_cells` and `K` take comma-separated lists, combined per
/// `pairing` (product or zip); `method = both` expands to the two backends.
/// Warnings (e.g. an empty file) are appended to `warnings` when given.
SweepPlan parse_config(std::istream& in, std::vector<std::string>* warnings = nullptr);
SweepPlan load_config(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Case 1, (n_h, K) in {(11,40),(26,100),(51,200),(101,400)}, both methods.
SweepPlan table2_plan();
/// Case 2, eps = 1e-3, (n_h, K) in {(129,9),(129,1025),(1025,5),(1025,1025)}, both methods.
SweepPlan table3_plan();

/// Parse "<case>/<method>/<n_h>/<K>" back into a run with default settings.
RunSpec parse_run_id(const std::string& id);

}  // namespace stoc::bench
