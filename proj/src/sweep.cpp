#include "stoc/bench/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace stoc::bench {

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "case", "method", "dim", "n_h", "K", "J_final", "misfit_term", "reg_term", "iterations", "stop_reason",
        "wall_time_seconds", "projected_gradient_norm"};
    return cols;
}

std::string csv_header() {
    std::string h;
    for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

namespace {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

}  // namespace

std::string format_row(const BenchRow& r) {
    std::ostringstream os;
    os << r.case_name << ',' << r.method << ',' << r.dim << ',' << r.n_h << ',' << r.K << ',' << sci(r.J_final) << ','
       << sci(r.misfit_term) << ',' << sci(r.reg_term) << ',' << r.iterations << ',' << r.stop_reason << ','
       << sci(r.wall_time_seconds) << ',' << sci(r.projected_gradient_norm);
    return os.str();
}

BenchRow parse_row(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != csv_columns().size())
        throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields, expected " +
                                 std::to_string(csv_columns().size()));
    BenchRow r;
    r.case_name = f[0];
    r.method = f[1];
    r.dim = std::stoul(f[2]);
    r.n_h = std::stoul(f[3]);
    r.K = std::stoul(f[4]);
    r.J_final = std::stod(f[5]);
    r.misfit_term = std::stod(f[6]);
    r.reg_term = std::stod(f[7]);
    r.iterations = std::stoul(f[8]);
    r.stop_reason = f[9];
    r.wall_time_seconds = std::stod(f[10]);
    r.projected_gradient_norm = std::stod(f[11]);
    return r;
}

std::vector<BenchRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) throw std::runtime_error("CSV header mismatch in " + path.string());
    std::vector<BenchRow> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(parse_row(line));
    return rows;
}

CsvSink::CsvSink(std::filesystem::path path) : path_(std::move(path)) {
    const bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
    if (fresh) {
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + path_.string() + "'");
        out << csv_header() << '\n';
    }
}

void CsvSink::append(const BenchRow& row) {
    const std::string line = format_row(row) + '\n';
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to '" + path_.string() + "'");
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
}

RunOutcome execute(const RunSpec& run) {
    RunOutcome out;
    out.spec = run;
    out.row.case_name = run.spec.name;
    out.row.method = to_string(run.method);
    out.row.dim = run.spec.dim;
    out.row.n_h = run.n_h();
    out.row.K = run.K;
    try {
        out.problem = std::make_unique<DiscreteProblem<double>>(discretize(run.spec.make(run.n_cells, run.K)));
        const auto& dp = *out.problem;
        std::unique_ptr<SolverBackend<double>> backend;
        if (run.method == Method::space_time) backend = std::make_unique<SpaceTimeBackend<double>>(dp);
        else backend = std::make_unique<SemiDiscreteBackend<double>>(dp, run.sampling);

        out.record = stoc::run(dp, *backend, run.config);
        const auto& rec = out.record;
        const auto& last = rec.history.back();
        out.row.J_final = last.objective;
        out.row.misfit_term = last.misfit;
        out.row.reg_term = last.regularization;
        out.row.iterations = rec.iterations;
        out.row.stop_reason = to_string(rec.stop_reason);
        out.row.wall_time_seconds = rec.wall_time_seconds;
        out.row.projected_gradient_norm =
            kkt_residual(dp, rec.u, reduced_gradient(dp, rec.u, rec.p), dp.bounds).projected_gradient_norm;
    } catch (const std::exception& ex) {
        out.row.stop_reason = "error";
        out.error = ex.what();
        out.row.J_final = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

std::vector<BenchRow> run_sweep(const SweepPlan& plan, const SweepOptions& options, std::ostream* log) {
    std::vector<BenchRow> rows(plan.size());
    std::unique_ptr<CsvSink> sink;
    if (!options.csv.empty()) sink = std::make_unique<CsvSink>(options.csv);
    std::mutex log_mutex;

    auto work = [&](std::size_t i) {
        auto outcome = execute(plan[i]);
        rows[i] = outcome.row;
        if (sink) sink->append(outcome.row);
        if (log) {
            std::lock_guard lock(log_mutex);
            *log << format_row(outcome.row) << '\n';
            if (!outcome.error.empty()) *log << "  error in " << plan[i].id() << ": " << outcome.error << '\n';
        }
    };

    const std::size_t workers = options.timing ? 1 : std::max<std::size_t>(1, options.threads);
    if (workers == 1) {
        for (std::size_t i = 0; i < plan.size(); ++i) work(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, plan.size()); ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < plan.size(); i = next++) work(i);
        });
    pool.clear();
    return rows;
}

namespace {

void write_slice(const std::filesystem::path& file, const SpatialDiscretization<double>& spatial,
                 const Eigen::Ref<const VectorX<double>>& values) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    out << std::setprecision(12);
    for (std::size_t i = 0; i < spatial.n_h; ++i) {
        const auto x = spatial.point(i);
        for (Eigen::Index d = 0; d < x.size(); ++d) out << x(d) << ' ';
        out << values(static_cast<Eigen::Index>(i)) << '\n';
    }
}

std::string slice_name(const char* stem, std::size_t k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05zu.txt", stem, k);
    return buf;
}

}  // namespace

void dump_fields(const RunOutcome& outcome, const std::filesystem::path& dir) {
    if (!outcome.problem) throw std::runtime_error("dump_fields: run did not complete");
    const auto& dp = *outcome.problem;
    const auto& rec = outcome.record;
    std::filesystem::create_directories(dir);

    for (std::size_t l = 0; l < dp.K(); ++l) {
        write_slice(dir / slice_name("control", l), dp.spatial, rec.u.block(l));
        write_slice(dir / slice_name("adjoint", l), dp.spatial, rec.p.block(l));
    }
    for (std::size_t k = 0; k <= dp.K(); ++k) write_slice(dir / slice_name("state", k), dp.spatial, rec.y.block(k));

    std::ofstream m(dir / "manifest.txt");
    if (!m) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
    m << std::setprecision(17);
    m << "run_id = " << outcome.spec.id() << '\n';
    m << "case = " << outcome.spec.spec.name << '\n';
    m << "method = " << to_string(outcome.spec.method) << '\n';
    m << "dim = " << dp.spatial.dim << '\n';
    m << "axis_nodes =";
    for (const auto& ax : dp.spatial.axes) m << ' ' << ax.n_nodes();
    m << '\n';
    m << "n_h = " << dp.n_h() << '\n';
    m << "T = " << dp.grid.T << '\n';
    m << "K = " << dp.K() << '\n';
    m << "dt = " << dp.grid.dt << '\n';
    m << "iterations = " << rec.iterations << '\n';
    m << "stop_reason = " << to_string(rec.stop_reason) << '\n';
    m << "J_final = " << rec.final_objective() << '\n';
    m << "timing_scope = optimizer loop only (assembly excluded)\n";
    m << "layout = one row per node: coordinates then value; nodes row-major over the tensor grid, axis 0 slowest\n";
    m << "control_files = control_NNNNN.txt, one per time interval, NNNNN = 0..K-1\n";
    m << "adjoint_files = adjoint_NNNNN.txt, one per time interval, NNNNN = 0..K-1\n";
    m << "state_files = state_NNNNN.txt, one per time node, NNNNN = 0..K\n";
}

}  // namespace stoc::bench
