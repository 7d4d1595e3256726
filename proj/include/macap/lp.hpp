#pragma once

#include <cstdint>
#include <vector>

#include "macap/errors.hpp"

namespace macap {

// maximize <c, x> subject to rows . x = rhs, x >= 0.
struct LpProblem {
    std::size_t num_vars = 0;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<double> objective;
};

struct LpSolution {
    double value = 0.0;
    std::vector<double> x;
    std::uint64_t pivots = 0;
};

// Dense two-phase primal simplex. Bland's entering rule; the ratio test
// prefers the largest pivot among ties, then the lowest row. Feasibility
// and reduced-cost tolerances are 1e-9.
LpSolution solve_lp_max(const LpProblem& problem);

// Keep a maximal linearly independent subset of rows (Gaussian elimination
// on copies); the dropped rows are implied by the kept ones.
std::vector<std::size_t> independent_rows(const std::vector<std::vector<double>>& rows);

}  // namespace macap
