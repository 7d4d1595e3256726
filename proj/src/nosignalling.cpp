#include "macap/nosignalling.hpp"

#include <cmath>
#include <string>

namespace macap {

NsConstraintSystem build_ns_system(const NonlocalGame& game, const NsOptions& opts) {
    std::size_t x_total = game.question_space();
    std::size_t y_total = game.answer_space();
    double var_count = static_cast<double>(x_total) * static_cast<double>(y_total);
    if (var_count > opts.ceiling) {
        throw RefusalError("no-signalling system needs " + std::to_string(var_count) +
                               " variables, above ceiling " + std::to_string(opts.ceiling),
                           var_count);
    }

    NsConstraintSystem sys;
    sys.num_blocks = x_total;
    sys.block_size = y_total;
    std::size_t n = x_total * y_total;

    // For player i, question x_i and answer y_i: the marginal
    // sum_{y : y_i fixed} v(y | x) must agree across all x sharing x_i.
    // Consecutive differences give rows summing to zero.
    std::vector<std::vector<double>> rows;
    for (std::size_t player = 0; player < game.players(); ++player) {
        std::size_t nx = game.question_sizes()[player];
        std::size_t ny = game.answer_sizes()[player];
        for (std::size_t xi = 0; xi < nx; ++xi) {
            // question tuples whose player-th entry equals xi, in index order
            std::vector<std::size_t> sharing;
            for (std::size_t q = 0; q < x_total; ++q) {
                if (game.question_tuple(q)[player] == xi) sharing.push_back(q);
            }
            if (sharing.size() < 2) continue;
            for (std::size_t yi = 0; yi < ny; ++yi) {
                std::vector<std::size_t> marginal_answers;
                for (std::size_t a = 0; a < y_total; ++a) {
                    if (game.answer_tuple(a)[player] == yi) marginal_answers.push_back(a);
                }
                for (std::size_t k = 0; k + 1 < sharing.size(); ++k) {
                    std::vector<double> row(n, 0.0);
                    for (std::size_t a : marginal_answers) {
                        row[sharing[k] * y_total + a] += 1.0;
                        row[sharing[k + 1] * y_total + a] -= 1.0;
                    }
                    rows.push_back(std::move(row));
                }
            }
        }
    }

    for (std::size_t keep : independent_rows(rows)) {
        sys.equality_rows.push_back(rows[keep]);
    }

    sys.objective.assign(n, 0.0);
    double inv_d = 1.0 / static_cast<double>(x_total);
    for (std::size_t q = 0; q < x_total; ++q) {
        for (std::size_t a = 0; a < y_total; ++a) {
            if (game.wins(q, a)) sys.objective[q * y_total + a] = inv_d;
        }
    }
    return sys;
}

NsReport max_ns_winning_prob(const NonlocalGame& game, const NsOptions& opts) {
    NsConstraintSystem sys = build_ns_system(game, opts);
    std::size_t n = sys.num_blocks * sys.block_size;

    LpProblem lp;
    lp.num_vars = n;
    lp.objective = sys.objective;
    for (std::size_t q = 0; q < sys.num_blocks; ++q) {
        std::vector<double> row(n, 0.0);
        for (std::size_t a = 0; a < sys.block_size; ++a) row[q * sys.block_size + a] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(1.0);
    }
    for (const auto& row : sys.equality_rows) {
        lp.rows.push_back(row);
        lp.rhs.push_back(0.0);
    }

    LpSolution solution = solve_lp_max(lp);

    NsReport report;
    report.omega = solution.value;
    report.strategy.num_blocks = sys.num_blocks;
    report.strategy.block_size = sys.block_size;
    report.strategy.v = std::move(solution.x);
    return report;
}

WinningVector winning_vector_of(const NonlocalGame& game, const StrategyVector& strategy) {
    if (strategy.num_blocks != game.question_space() ||
        strategy.block_size != game.answer_space()) {
        throw ValidationError("strategy shape does not match the game");
    }
    WinningVector w;
    w.w.assign(game.question_space(), 0.0);
    for (std::size_t q = 0; q < strategy.num_blocks; ++q) {
        double acc = 0.0;
        for (std::size_t a = 0; a < strategy.block_size; ++a) {
            if (game.wins(q, a)) acc += strategy.at(q, a);
        }
        w.w[q] = std::min(acc, 1.0);
    }
    return w;
}

}  // namespace macap
