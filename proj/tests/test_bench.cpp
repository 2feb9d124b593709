#include "helpers.hpp"
#include "stoc/bench/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stoc;
using namespace stoc::bench;

namespace {

SweepPlan parse(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return parse_config(in, warnings);
}

std::size_t error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return 0;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("stoc_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::vector<std::vector<double>> read_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<double> r;
        double v;
        while (ss >> v) r.push_back(v);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("case library") {
    CHECK(case_names().size() == 4);
    CHECK_THROWS_AS(find_case("case9"), UnknownCase);
    const auto c2 = find_case("case2", 1e-3);
    CHECK(c2.dim == 1);
    const auto dp = discretize(c2.make(1000, 2));
    // Nodes at x <= -eps map to 1, x >= eps to -1, linear in between.
    CHECK(dp.yd(0) == 1.0);
    CHECK(dp.yd(499) == 1.0);
    CHECK(dp.yd(500) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dp.yd(501) == -1.0);
    CHECK(regularized_jump(0.0005, 1e-3) == doctest::Approx(-0.5));
    CHECK(find_case("smooth2d").dim == 2);
    CHECK(discretize(find_case("smooth3d").make(3, 2)).n_h() == 64);
}

TEST_CASE("config grammar") {
    std::vector<std::string> warnings;
    const auto plan = parse(
        "# comment\n"
        "[defaults]\n"
        "case = case1\n"
        "tau_stagnation = 1e-9 ; trailing comment\n"
        "[run]\n"
        "n_cells = 10, 20\n"
        "K = 5, 7, 9\n"
        "method = space-time\n"
        "[run]\n"
        "case = smooth2d\n"
        "n_h = 5\n"
        "K = 3\n"
        "adjoint_sampling = interval-average\n",
        &warnings);
    CHECK(warnings.empty());
    REQUIRE(plan.size() == 6 + 2);
    CHECK(plan[0].n_cells == 10);
    CHECK(plan[0].K == 5);
    CHECK(plan[5].n_cells == 20);
    CHECK(plan[5].K == 9);
    CHECK(plan[0].config.tau_stagnation == 1e-9);
    CHECK(plan[6].spec.name == "smooth2d");
    CHECK(plan[6].n_cells == 4);
    CHECK(plan[6].n_h() == 25);
    CHECK(plan[6].method == Method::space_time);
    CHECK(plan[7].method == Method::semi_discrete);
    CHECK(plan[7].sampling == AdjointSampling::interval_average);
    CHECK(plan[6].id() == "smooth2d/space-time/25/3");
}

TEST_CASE("config errors carry line numbers") {
    CHECK(error_line("[run]\ncase = case1\nn_cells = 4\nK = abc\n") == 4);
    CHECK(error_line("[run]\ncase = nowhere\nn_cells = 4\nK = 3\n") == 2);
    CHECK(error_line("\n\n[run]\ncase = case1\nbogus = 1\n") == 5);
    CHECK(error_line("[run]\ncase = case1\nn_cells = 4\nK = 3\ntau_rel = 1e-9\ntau_abs = 1e-3\n") == 5);
    CHECK(error_line("[run\n") == 1);
    CHECK(error_line("[other]\n") == 1);
    CHECK(error_line("[run]\ncase = case1\nK = 3\n") == 1);
    CHECK(error_line("[run]\njust words\n") == 2);
    CHECK(error_line("[run]\ncase = case1\nn_cells = 2, 3\nK = 4\npairing = zip\n") == 5);
    CHECK_THROWS_AS(parse("[run]\ncase = case1\nn_cells = 4\nK = 3\nmethod = magic\n"), ConfigError);
}

TEST_CASE("empty configuration") {
    std::vector<std::string> warnings;
    CHECK(parse("", &warnings).empty());
    CHECK(warnings.size() == 1);
    warnings.clear();
    CHECK(parse("# only a comment\n\n", &warnings).empty());
    CHECK(warnings.size() == 1);
}

TEST_CASE("load_config reads files") {
    const auto dir = scratch("cfg");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "a.cfg") << "[run]\ncase = case2\nepsilon = 0.01\nn_cells = 8\nK = 4\nmethod = sd\n";
    const auto plan = load_config(dir / "a.cfg");
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].spec.epsilon == 0.01);
    CHECK(plan[0].method == Method::semi_discrete);
    CHECK_THROWS(load_config(dir / "missing.cfg"));
}

TEST_CASE("built-in plans") {
    const auto t2 = table2_plan();
    REQUIRE(t2.size() == 8);
    const std::size_t nh[] = {11, 26, 51, 101}, ks[] = {40, 100, 200, 400};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(t2[2 * i].n_h() == nh[i]);
        CHECK(t2[2 * i].K == ks[i]);
        CHECK(t2[2 * i].method == Method::space_time);
        CHECK(t2[2 * i + 1].method == Method::semi_discrete);
        CHECK(t2[2 * i].spec.name == "case1");
    }
    const auto t3 = table3_plan();
    REQUIRE(t3.size() == 8);
    CHECK(t3[0].spec.name == "case2");
    CHECK(t3[0].spec.epsilon == 1e-3);
    CHECK(t3[0].n_h() == 129);
    CHECK(t3[0].K == 9);
    CHECK(t3[2].K == 1025);
    CHECK(t3[4].n_h() == 1025);
    CHECK(t3[4].K == 5);
    CHECK(t3[6].K == 1025);
}

TEST_CASE("run ids round-trip") {
    const auto r = parse_run_id("smooth2d/semi-discrete/25/7");
    CHECK(r.n_cells == 4);
    CHECK(r.K == 7);
    CHECK(r.method == Method::semi_discrete);
    CHECK(r.id() == "smooth2d/semi-discrete/25/7");
    CHECK(parse_run_id("case2/space-time/129/64").n_cells == 128);
    CHECK_THROWS(parse_run_id("case1/space-time/11"));
    CHECK_THROWS(parse_run_id("smooth2d/space-time/24/3"));
    CHECK_THROWS(parse_run_id("case1/other/11/3"));
}

TEST_CASE("CSV schema") {
    CHECK(csv_header() ==
          "case,method,dim,n_h,K,J_final,misfit_term,reg_term,iterations,stop_reason,wall_time_seconds,"
          "projected_gradient_norm");
    BenchRow r{"case1", "space-time", 1, 11, 40, 2.2823456789e-5, 1.5e-5, 7.3e-6, 25, "stagnation", 0.0123, 3e-7};
    const auto back = parse_row(format_row(r));
    CHECK(back.case_name == r.case_name);
    CHECK(back.method == r.method);
    CHECK(back.n_h == 11);
    CHECK(back.K == 40);
    CHECK(back.J_final == doctest::Approx(r.J_final).epsilon(1e-10));
    CHECK(back.iterations == 25);
    CHECK(back.stop_reason == "stagnation");
    CHECK(back.projected_gradient_norm == doctest::Approx(3e-7));
    CHECK_THROWS(parse_row("a,b,c"));
}

TEST_CASE("sweeps are deterministic and persist rows") {
    const auto dir = scratch("sweep");
    std::filesystem::create_directories(dir);
    const auto plan = parse("[run]\ncase = case1\nn_cells = 6\nK = 8, 12\n");
    SweepOptions opts;
    opts.csv = dir / "out.csv";
    const auto a = run_sweep(plan, opts);
    SweepOptions par;
    par.timing = false;
    par.threads = 3;
    const auto b = run_sweep(plan, par);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].J_final == b[i].J_final);
        CHECK(a[i].iterations == b[i].iterations);
        CHECK(a[i].wall_time_seconds > 0.0);
    }
    const auto rows = read_csv(opts.csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].J_final == doctest::Approx(a[0].J_final).epsilon(1e-10));
    // Appending keeps a single header.
    run_sweep(plan, opts);
    CHECK(read_csv(opts.csv).size() == 8);
}

TEST_CASE("failed runs are recorded in-row") {
    RunSpec bad = parse_run_id("case1/space-time/5/4");
    bad.n_cells = 0;
    const auto out = execute(bad);
    CHECK(out.row.stop_reason == "error");
    CHECK(!out.error.empty());
}

TEST_CASE("field dumps") {
    const auto dir = scratch("dump");
    const auto out = execute(parse_run_id("case1/space-time/6/3"));
    dump_fields(out, dir);
    for (const char* f : {"control_00000.txt", "control_00002.txt", "adjoint_00002.txt", "state_00003.txt",
                          "manifest.txt"})
        CHECK(std::filesystem::exists(dir / f));
    CHECK(!std::filesystem::exists(dir / "control_00003.txt"));
    const auto ctrl = read_table(dir / "control_00001.txt");
    REQUIRE(ctrl.size() == 6);
    CHECK(ctrl[0].size() == 2);
    CHECK(ctrl[5][0] == doctest::Approx(1.0));

    std::ifstream m(dir / "manifest.txt");
    std::stringstream ss;
    ss << m.rdbuf();
    CHECK(ss.str().find("dim = 1") != std::string::npos);
    CHECK(ss.str().find("K = 3") != std::string::npos);
    CHECK(ss.str().find("axis_nodes = 6") != std::string::npos);

    // Zero control: start at zero with bounds that pin it.
    RunOutcome zero = execute(parse_run_id("case1/space-time/6/3"));
    zero.record.u.data().setZero();
    const auto zdir = scratch("dump_zero");
    dump_fields(zero, zdir);
    for (const auto& row : read_table(zdir / "control_00000.txt")) CHECK(row[1] == 0.0);

    const auto out2 = execute(parse_run_id("smooth2d/space-time/9/2"));
    const auto dir2 = scratch("dump2d");
    dump_fields(out2, dir2);
    const auto t = read_table(dir2 / "state_00002.txt");
    REQUIRE(t.size() == 9);
    CHECK(t[0].size() == 3);
    CHECK(t[1][0] == 0.0);
    CHECK(t[1][1] == doctest::Approx(0.5));
    CHECK(t[3][0] == doctest::Approx(0.5));
    CHECK(t[3][1] == 0.0);
}
