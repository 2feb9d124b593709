#include "stoc/bench/cases.hpp"

#include <cmath>
#include <numbers>

namespace stoc::bench {

double regularized_jump(double x, double epsilon) {
    if (x <= -epsilon) return 1.0;
    if (x >= epsilon) return -1.0;
    return -x / epsilon;
}

namespace {

ProblemData<double> case1(std::size_t n_cells, std::size_t K) {
    ProblemData<double> p;
    p.domain = {{0.0}, {1.0}, {n_cells}};
    p.T = 1.0;
    p.K = K;
    p.mu = 1.0;
    p.eta = [](double, const Point<double>&) { return 0.2; };
    p.y0 = [](const Point<double>&) { return 0.0; };
    p.yd = [](const Point<double>&) { return 0.2; };
    p.lambda = 0.01;
    p.bounds = {-0.1, 0.1};
    p.u_init = -0.1;
    return p;
}

ProblemData<double> case2(std::size_t n_cells, std::size_t K, double epsilon) {
    ProblemData<double> p;
    p.domain = {{-1.0}, {1.0}, {n_cells}};
    p.T = 1.0;
    p.K = K;
    p.mu = SpatialFunction<double>([](const Point<double>& x) { return x(0) * x(0); });
    p.eta = [](double t, const Point<double>& x) { return -x(0) * t; };
    p.y0 = [](const Point<double>&) { return 0.0; };
    p.yd = [epsilon](const Point<double>& x) { return regularized_jump(x(0), epsilon); };
    p.lambda = 0.01;
    p.bounds = {-30.0, 30.0};
    p.u_init = 0.0;
    return p;
}

ProblemData<double> smooth(std::size_t dim, std::size_t n_cells, std::size_t K) {
    ProblemData<double> p;
    p.domain = {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), std::vector<std::size_t>(dim, n_cells)};
    p.T = 1.0;
    p.K = K;
    p.mu = 1.0;
    p.eta = [](double t, const Point<double>&) { return 0.2 * t; };
    p.y0 = [](const Point<double>&) { return 0.0; };
    p.yd = [](const Point<double>& x) {
        double v = 1.0;
        for (Eigen::Index d = 0; d < x.size(); ++d) v *= std::sin(std::numbers::pi * x(d));
        return v;
    };
    p.lambda = 0.01;
    p.bounds = {-10.0, 10.0};
    p.u_init = 0.0;
    return p;
}

}  // namespace

ProblemData<double> CaseSpec::make(std::size_t n_cells, std::size_t K) const {
    if (name == "case1") return case1(n_cells, K);
    if (name == "case2") return case2(n_cells, K, epsilon);
    if (name == "smooth2d") return smooth(2, n_cells, K);
    if (name == "smooth3d") return smooth(3, n_cells, K);
    throw UnknownCase("unknown case '" + name + "'");
}

CaseSpec find_case(const std::string& name, double epsilon) {
    if (name == "case1" || name == "case2") return {name, 1, epsilon};
    if (name == "smooth2d") return {name, 2, epsilon};
    if (name == "smooth3d") return {name, 3, epsilon};
    throw UnknownCase("unknown case '" + name + "'");
}

std::vector<std::string> case_names() { return {"case1", "case2", "smooth2d", "smooth3d"}; }

}  // namespace stoc::bench
