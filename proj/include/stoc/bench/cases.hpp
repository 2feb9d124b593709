#pragma once

#include "stoc/control.hpp"

#include <string>
#include <vector>

namespace stoc::bench {

class UnknownCase : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Named benchmark problem; resolves to ProblemData for any (n_cells, K).
struct CaseSpec {
    std::string name;
    std::size_t dim = 1;
    /// Width of the regularized jump in the case-2 target.
    double epsilon = 1e-3;

    ProblemData<double> make(std::size_t n_cells, std::size_t K) const;
};

/// case1, case2 (1d benchmark data), smooth2d, smooth3d.
CaseSpec find_case(const std::string& name, double epsilon = 1e-3);

std::vector<std::string> case_names();

/// Case-2 target: 1 left of -eps, -1 right of eps, linear in between.
double regularized_jump(double x, double epsilon);

}  // namespace stoc::bench
