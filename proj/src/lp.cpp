#include "macap/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace macap {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

struct Tableau {
    std::size_t rows, cols;      // cols excludes the rhs column
    std::vector<double> a;       // rows x (cols + 1), rhs last
    std::vector<std::size_t> basis;
    std::uint64_t pivots = 0;

    double& at(std::size_t r, std::size_t c) { return a[r * (cols + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * (cols + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols); }

    void pivot(std::size_t pr, std::size_t pc) {
        double pv = at(pr, pc);
        for (std::size_t c = 0; c <= cols; ++c) at(pr, c) /= pv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == pr) continue;
            double factor = at(r, pc);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= factor * at(pr, c);
        }
        basis[pr] = pc;
        ++pivots;
    }
};

// One simplex phase: maximize cost over the current tableau. Entering
// column by Bland's rule; leaving row by minimum ratio, largest pivot on
// ties, then lowest row.
void run_phase(Tableau& t, std::vector<double>& cost, double& objective,
               const std::vector<bool>& allowed) {
    while (true) {
        std::size_t entering = t.cols;
        for (std::size_t c = 0; c < t.cols; ++c) {
            if (allowed[c] && cost[c] > kCostTol) {
                entering = c;
                break;
            }
        }
        if (entering == t.cols) return;  // optimal

        std::size_t leaving = t.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        double best_pivot = 0.0;
        for (std::size_t r = 0; r < t.rows; ++r) {
            double col = t.at(r, entering);
            if (col <= kPivotTol) continue;
            double ratio = t.rhs(r) / col;
            if (ratio < best_ratio - 1e-12 ||
                (ratio <= best_ratio + 1e-12 && col > best_pivot)) {
                best_ratio = ratio;
                best_pivot = col;
                leaving = r;
            }
        }
        if (leaving == t.rows) {
            throw ValidationError("linear program is unbounded");
        }

        t.pivot(leaving, entering);
        double factor = cost[entering];
        for (std::size_t c = 0; c < t.cols; ++c) cost[c] -= factor * t.at(leaving, c);
        objective += factor * t.rhs(leaving);
    }
}

}  // namespace

std::vector<std::size_t> independent_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    std::size_t n = rows[0].size();
    std::vector<std::vector<double>> work;
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> candidate = rows[r];
        for (const auto& basis_row : work) {
            // basis rows are normalized with a unit leading entry
            std::size_t lead = 0;
            while (lead < n && basis_row[lead] == 0.0) ++lead;
            if (lead == n) continue;
            double factor = candidate[lead];
            if (factor == 0.0) continue;
            for (std::size_t c = lead; c < n; ++c) candidate[c] -= factor * basis_row[c];
        }
        double norm = 0.0;
        std::size_t lead = n;
        for (std::size_t c = 0; c < n; ++c) {
            norm = std::max(norm, std::abs(candidate[c]));
            if (lead == n && std::abs(candidate[c]) > 1e-10) lead = c;
        }
        if (lead == n || norm <= 1e-10) continue;  // dependent
        double scale = candidate[lead];
        for (std::size_t c = lead; c < n; ++c) candidate[c] /= scale;
        // keep rows in echelon order by leading column
        auto pos = std::lower_bound(work.begin(), work.end(), candidate,
                                    [n](const std::vector<double>& a, const std::vector<double>& b) {
                                        std::size_t la = 0, lb = 0;
                                        while (la < n && a[la] == 0.0) ++la;
                                        while (lb < n && b[lb] == 0.0) ++lb;
                                        return la < lb;
                                    });
        // re-reduce rows below is unnecessary for rank queries
        work.insert(pos, std::move(candidate));
        kept.push_back(r);
    }
    return kept;
}

LpSolution solve_lp_max(const LpProblem& problem) {
    std::size_t m = problem.rows.size();
    std::size_t n = problem.num_vars;
    if (problem.rhs.size() != m || problem.objective.size() != n) {
        throw ValidationError("LP shape mismatch");
    }

    Tableau t;
    t.rows = m;
    t.cols = n + m;  // artificials appended
    t.a.assign(m * (t.cols + 1), 0.0);
    t.basis.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        double sign = problem.rhs[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign * problem.rows[r][c];
        t.at(r, n + r) = 1.0;
        t.rhs(r) = sign * problem.rhs[r];
        t.basis[r] = n + r;
    }

    // Phase 1: maximize -sum(artificials)
    std::vector<double> cost(t.cols, 0.0);
    double objective = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) cost[c] += t.at(r, c);
        objective -= t.rhs(r);
    }
    std::vector<bool> allowed(t.cols, true);
    run_phase(t, cost, objective, allowed);
    if (objective < -kFeasTol) {
        throw ValidationError("linear program infeasible (phase 1 residual " +
                              std::to_string(-objective) + ")");
    }

    // Drive leftover artificials out of the basis; rows that cannot pivot
    // are redundant and get neutralized.
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis[r] < n) continue;
        std::size_t pc = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (std::abs(t.at(r, c)) > 1e-8) {
                pc = c;
                break;
            }
        }
        if (pc < n) {
            t.pivot(r, pc);
        } else {
            for (std::size_t c = 0; c <= t.cols; ++c) t.at(r, c) = 0.0;
            t.at(r, t.basis[r]) = 1.0;
        }
    }

    // Phase 2 over the original objective, artificials barred.
    for (std::size_t c = n; c < t.cols; ++c) allowed[c] = false;
    std::vector<double> cost2(t.cols, 0.0);
    for (std::size_t c = 0; c < n; ++c) cost2[c] = problem.objective[c];
    double value = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis[r] >= n) continue;
        double factor = cost2[t.basis[r]];
        if (factor == 0.0) continue;
        for (std::size_t c = 0; c < t.cols; ++c) cost2[c] -= factor * t.at(r, c);
        value += factor * t.rhs(r);
        cost2[t.basis[r]] = 0.0;
    }
    run_phase(t, cost2, value, allowed);

    LpSolution solution;
    solution.value = value;
    solution.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis[r] < n) solution.x[t.basis[r]] = t.rhs(r);
    }
    solution.pivots = t.pivots;
    return solution;
}

}  // namespace macap
