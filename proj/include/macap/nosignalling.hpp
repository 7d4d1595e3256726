#pragma once

#include <vector>

#include "macap/games.hpp"
#include "macap/lp.hpp"

namespace macap {

// Strategy as one block per question tuple, each block a distribution over
// answer tuples.
struct StrategyVector {
    std::size_t num_blocks = 0;
    std::size_t block_size = 0;
    std::vector<double> v;

    double at(std::size_t question, std::size_t answer) const {
        return v[question * block_size + answer];
    }
};

struct NsConstraintSystem {
    std::size_t num_blocks = 0;  // |X|
    std::size_t block_size = 0;  // |Y|
    // Marginal-equality rows D S v = 0; linearly independent, each sums to 0.
    std::vector<std::vector<double>> equality_rows;
    std::vector<double> objective;  // 1/d on winning coordinates
};

struct NsOptions {
    double ceiling = 1e7;  // refusal guard on |X| |Y|
};

NsConstraintSystem build_ns_system(const NonlocalGame& game, const NsOptions& opts = {});

struct NsReport {
    double omega = 0.0;
    StrategyVector strategy;
};

// Maximum uniform-question winning probability over no-signalling
// strategies, by linear programming over the polytope.
NsReport max_ns_winning_prob(const NonlocalGame& game, const NsOptions& opts = {});

// Per-question winning probabilities of a strategy vector.
WinningVector winning_vector_of(const NonlocalGame& game, const StrategyVector& strategy);

}  // namespace macap
