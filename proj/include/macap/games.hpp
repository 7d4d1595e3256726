#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "macap/prob.hpp"

namespace macap {

// Promise-free nonlocal game. Question and answer tuples are indexed
// row-major over players, player 1 slowest. The winning set holds
// (question index, answer index) pairs, kept sorted.
class NonlocalGame {
public:
    NonlocalGame(std::vector<std::size_t> question_sizes, std::vector<std::size_t> answer_sizes,
                 std::vector<std::pair<std::size_t, std::size_t>> winning);

    std::size_t players() const { return question_sizes_.size(); }
    const std::vector<std::size_t>& question_sizes() const { return question_sizes_; }
    const std::vector<std::size_t>& answer_sizes() const { return answer_sizes_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& winning() const { return winning_; }

    std::size_t question_space() const { return d_; }  // d = prod |X_i|
    std::size_t answer_space() const { return y_; }

    bool wins(std::size_t q_index, std::size_t a_index) const {
        return win_table_[q_index * y_ + a_index];
    }

    std::size_t question_index(const std::vector<std::size_t>& tuple) const;
    std::size_t answer_index(const std::vector<std::size_t>& tuple) const;
    std::vector<std::size_t> question_tuple(std::size_t index) const;
    std::vector<std::size_t> answer_tuple(std::size_t index) const;

private:
    std::vector<std::size_t> question_sizes_, answer_sizes_;
    std::vector<std::pair<std::size_t, std::size_t>> winning_;
    std::size_t d_ = 0, y_ = 0;
    std::vector<char> win_table_;
};

NonlocalGame chsh();
NonlocalGame magic_square();
NonlocalGame multiparty_parity(std::size_t players);
NonlocalGame signalling(std::size_t m1, std::size_t m2);

// Winning inputs transmit the question tuple noiselessly, losing inputs
// yield a uniformly random question tuple. Two players only; the general-N
// transition is available through game_mac_transition.
Mac build_game_mac(const NonlocalGame& game);

// Transition matrix (z, joint input) of the game MAC for any player count.
// Joint inputs are indexed row-major over players of b_i = x_i |Y_i| + y_i.
std::vector<double> game_mac_transition(const NonlocalGame& game);

// Shared correlation P(answer tuple | joint MAC input tuple).
class Correlation {
public:
    Correlation(const NonlocalGame& game, std::vector<double> table);

    double at(std::size_t input_index, std::size_t answer_index) const {
        return table_[input_index * y_ + answer_index];
    }

    // The PR box: wins CHSH with certainty, ignores the input answers.
    static Correlation pr_box(const NonlocalGame& chsh_game);
    // P(y'|xy) = strategy(y'|x); lifts a game strategy to a correlation.
    static Correlation from_strategy(const NonlocalGame& game,
                                     const std::vector<double>& strategy);

private:
    std::size_t y_;
    std::vector<double> table_;  // (input, answer) row-major
};

// Local post-processing f_i(ybar | x, y, y') per player.
class PostProcessing {
public:
    PostProcessing(const NonlocalGame& game, std::vector<std::vector<double>> tables);

    // f_i = delta(ybar, y'): forward the correlation's answer.
    static PostProcessing pass_through(const NonlocalGame& game);
    // f_i = delta(ybar, y): ignore the correlation, keep the input answer.
    static PostProcessing keep_input_answer(const NonlocalGame& game);

    // Probability of final answer tuple ybar given joint input b and
    // correlation output y'.
    double apply(const NonlocalGame& game, std::size_t input_index, std::size_t corr_answer,
                 std::size_t final_answer) const;

    const std::vector<std::vector<double>>& tables() const { return tables_; }

private:
    std::vector<std::vector<double>> tables_;  // per player, (x, y, y', ybar) row-major
};

Mac assisted_mac(const NonlocalGame& game, const Correlation& corr, const PostProcessing& post);

// Per-question winning probabilities of a strategy, with the induced
// left-stochastic output map.
struct WinningVector {
    std::vector<double> w;

    std::size_t dim() const { return w.size(); }
    // Output distribution w_i pi_i + (1 - <pi, w>)/d.
    std::vector<double> apply(const ProbabilityVector& pi) const;
};

// max_pi of the mutual information for a 0/1 winning vector with K ones.
double deterministic_max_mi(std::size_t d, std::size_t k);

// H(Wbar pi) + <pi, w> ln d - ln d, in nats.
double mi_given_winning_vector(const WinningVector& w, const ProbabilityVector& pi);

// Closed-form max_pi for strictly positive winning vectors.
double istar_positive_w(const WinningVector& w);

// ln(d - 1 + d^{-(1 - omega) d}): the correlation-assisted sum-rate bound.
double correlation_bound(std::size_t d, double omega);

double promise_free_winning_prob(double omega_promise, std::size_t promise_size,
                                 std::size_t question_space);

struct ClassicalStrategyReport {
    double omega = 0.0;
    // answer_functions[i][x] = answer of player i to question x.
    std::vector<std::vector<std::size_t>> answer_functions;
};

struct EnumerationOptions {
    double ceiling = 1e7;  // refusal guard on the deterministic strategy count
    unsigned threads = 1;
};

// Exhaustive search over per-player deterministic strategies under uniform
// questions. Lowest-lexicographic witness on ties.
ClassicalStrategyReport classical_winning_prob(const NonlocalGame& game,
                                               const EnumerationOptions& opts = {});

double full_communication_winning_prob(const NonlocalGame& game);

// Reported quantum winning probabilities for the built-in games.
double quantum_winning_prob(const std::string& builtin_name);

}  // namespace macap
