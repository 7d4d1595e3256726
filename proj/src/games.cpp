#include "macap/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "macap/errors.hpp"

namespace macap {

namespace {

std::size_t space_size(const std::vector<std::size_t>& sizes) {
    std::size_t total = 1;
    for (std::size_t s : sizes) {
        if (s == 0) throw ValidationError("alphabet sizes must be positive");
        total *= s;
    }
    return total;
}

std::size_t tuple_index(const std::vector<std::size_t>& tuple,
                        const std::vector<std::size_t>& sizes) {
    if (tuple.size() != sizes.size()) throw ValidationError("tuple arity mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] >= sizes[i]) throw ValidationError("tuple entry out of range");
        idx = idx * sizes[i] + tuple[i];
    }
    return idx;
}

std::vector<std::size_t> tuple_of_index(std::size_t index, const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> tuple(sizes.size());
    for (std::size_t i = sizes.size(); i-- > 0;) {
        tuple[i] = index % sizes[i];
        index /= sizes[i];
    }
    return tuple;
}

}  // namespace

NonlocalGame::NonlocalGame(std::vector<std::size_t> question_sizes,
                           std::vector<std::size_t> answer_sizes,
                           std::vector<std::pair<std::size_t, std::size_t>> winning)
    : question_sizes_(std::move(question_sizes)),
      answer_sizes_(std::move(answer_sizes)),
      winning_(std::move(winning)) {
    if (question_sizes_.size() < 2) throw ValidationError("a nonlocal game needs >= 2 players");
    if (answer_sizes_.size() != question_sizes_.size()) {
        throw ValidationError("question and answer size lists must have equal length");
    }
    d_ = space_size(question_sizes_);
    y_ = space_size(answer_sizes_);
    std::sort(winning_.begin(), winning_.end());
    winning_.erase(std::unique(winning_.begin(), winning_.end()), winning_.end());
    win_table_.assign(d_ * y_, 0);
    for (const auto& [q, a] : winning_) {
        if (q >= d_ || a >= y_) throw ValidationError("winning pair indexes invalid alphabets");
        win_table_[q * y_ + a] = 1;
    }
}

std::size_t NonlocalGame::question_index(const std::vector<std::size_t>& tuple) const {
    return tuple_index(tuple, question_sizes_);
}

std::size_t NonlocalGame::answer_index(const std::vector<std::size_t>& tuple) const {
    return tuple_index(tuple, answer_sizes_);
}

std::vector<std::size_t> NonlocalGame::question_tuple(std::size_t index) const {
    return tuple_of_index(index, question_sizes_);
}

std::vector<std::size_t> NonlocalGame::answer_tuple(std::size_t index) const {
    return tuple_of_index(index, answer_sizes_);
}

NonlocalGame chsh() {
    std::vector<std::pair<std::size_t, std::size_t>> winning;
    for (std::size_t x1 = 0; x1 < 2; ++x1) {
        for (std::size_t x2 = 0; x2 < 2; ++x2) {
            for (std::size_t y1 = 0; y1 < 2; ++y1) {
                for (std::size_t y2 = 0; y2 < 2; ++y2) {
                    if ((x1 & x2) == (y1 ^ y2)) {
                        winning.emplace_back(x1 * 2 + x2, y1 * 2 + y2);
                    }
                }
            }
        }
    }
    return NonlocalGame({2, 2}, {2, 2}, std::move(winning));
}

NonlocalGame magic_square() {
    // Alice fills her row, Bob his column, both as 3-bit strings (bit j of
    // the answer = cell j along the line). Win: row parity even, column
    // parity odd, and the shared cell agrees. Invalid parities simply lose.
    auto bit = [](std::size_t word, std::size_t j) { return (word >> j) & 1u; };
    std::vector<std::pair<std::size_t, std::size_t>> winning;
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t ya = 0; ya < 8; ++ya) {
                for (std::size_t yb = 0; yb < 8; ++yb) {
                    std::size_t row_parity = bit(ya, 0) ^ bit(ya, 1) ^ bit(ya, 2);
                    std::size_t col_parity = bit(yb, 0) ^ bit(yb, 1) ^ bit(yb, 2);
                    if (row_parity == 0 && col_parity == 1 && bit(ya, c) == bit(yb, r)) {
                        winning.emplace_back(r * 3 + c, ya * 8 + yb);
                    }
                }
            }
        }
    }
    return NonlocalGame({3, 3}, {8, 8}, std::move(winning));
}

NonlocalGame multiparty_parity(std::size_t players) {
    if (players < 2) throw ValidationError("multiparty parity needs >= 2 players");
    if (players > 20) throw ValidationError("multiparty parity capped at 20 players");
    std::size_t d = std::size_t{1} << players;
    std::vector<std::pair<std::size_t, std::size_t>> winning;
    for (std::size_t x = 0; x < d; ++x) {
        std::size_t ones = static_cast<std::size_t>(__builtin_popcountll(x));
        bool promised = ones % 2 == 0;
        for (std::size_t y = 0; y < d; ++y) {
            if (!promised) {
                winning.emplace_back(x, y);  // automatic win off the promise
                continue;
            }
            std::size_t answer_ones = static_cast<std::size_t>(__builtin_popcountll(y));
            if ((answer_ones + ones / 2) % 2 == 0) winning.emplace_back(x, y);
        }
    }
    return NonlocalGame(std::vector<std::size_t>(players, 2), std::vector<std::size_t>(players, 2),
                        std::move(winning));
}

NonlocalGame signalling(std::size_t m1, std::size_t m2) {
    if (m1 < 2 || m2 < 2) throw ValidationError("signalling game needs question sets of size >= 2");
    std::vector<std::pair<std::size_t, std::size_t>> winning;
    for (std::size_t x1 = 0; x1 < m1; ++x1) {
        for (std::size_t x2 = 0; x2 < m2; ++x2) {
            // each player guesses the other's question: y1 = x2, y2 = x1
            winning.emplace_back(x1 * m2 + x2, x2 * m1 + x1);
        }
    }
    return NonlocalGame({m1, m2}, {m2, m1}, std::move(winning));
}

std::vector<double> game_mac_transition(const NonlocalGame& game) {
    std::size_t players = game.players();
    std::vector<std::size_t> input_sizes(players);
    for (std::size_t i = 0; i < players; ++i) {
        input_sizes[i] = game.question_sizes()[i] * game.answer_sizes()[i];
    }
    std::size_t b_total = space_size(input_sizes);
    std::size_t d = game.question_space();
    std::vector<double> transition(d * b_total, 0.0);

    for (std::size_t b = 0; b < b_total; ++b) {
        std::vector<std::size_t> parts = tuple_of_index(b, input_sizes);
        std::vector<std::size_t> x(players), y(players);
        for (std::size_t i = 0; i < players; ++i) {
            x[i] = parts[i] / game.answer_sizes()[i];
            y[i] = parts[i] % game.answer_sizes()[i];
        }
        std::size_t q = game.question_index(x);
        std::size_t a = game.answer_index(y);
        if (game.wins(q, a)) {
            transition[q * b_total + b] = 1.0;
        } else {
            for (std::size_t z = 0; z < d; ++z) {
                transition[z * b_total + b] = 1.0 / static_cast<double>(d);
            }
        }
    }
    return transition;
}

Mac build_game_mac(const NonlocalGame& game) {
    if (game.players() != 2) {
        throw ValidationError(
            "build_game_mac shapes a two-sender MAC; use game_mac_transition for more players");
    }
    std::size_t d1 = game.question_sizes()[0] * game.answer_sizes()[0];
    std::size_t d2 = game.question_sizes()[1] * game.answer_sizes()[1];
    std::vector<double> flat = game_mac_transition(game);  // (z, b1 * d2 + b2)
    return Mac(d1, d2, game.question_space(), std::move(flat));
}

Correlation::Correlation(const NonlocalGame& game, std::vector<double> table)
    : y_(game.answer_space()), table_(std::move(table)) {
    std::size_t inputs = 1;
    for (std::size_t i = 0; i < game.players(); ++i) {
        inputs *= game.question_sizes()[i] * game.answer_sizes()[i];
    }
    if (table_.size() != inputs * y_) {
        throw ValidationError("correlation table has the wrong shape");
    }
    for (std::size_t b = 0; b < inputs; ++b) {
        double sum = 0.0;
        for (std::size_t a = 0; a < y_; ++a) {
            double v = table_[b * y_ + a];
            if (!(v >= 0.0)) throw ValidationError("correlation entries must be nonnegative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbTolerance) {
            throw ValidationError("correlation slice for input " + std::to_string(b) +
                                  " sums to " + std::to_string(sum));
        }
    }
}

Correlation Correlation::pr_box(const NonlocalGame& chsh_game) {
    if (chsh_game.players() != 2 || chsh_game.question_space() != 4 ||
        chsh_game.answer_space() != 4) {
        throw ValidationError("the PR box is defined for the CHSH shape");
    }
    std::size_t inputs = 16;
    std::vector<double> table(inputs * 4, 0.0);
    for (std::size_t b = 0; b < inputs; ++b) {
        std::size_t b1 = b / 4, b2 = b % 4;
        std::size_t x1 = b1 / 2, x2 = b2 / 2;
        for (std::size_t y1 = 0; y1 < 2; ++y1) {
            for (std::size_t y2 = 0; y2 < 2; ++y2) {
                if ((x1 & x2) == (y1 ^ y2)) {
                    table[b * 4 + y1 * 2 + y2] = 0.5;
                }
            }
        }
    }
    return Correlation(chsh_game, std::move(table));
}

Correlation Correlation::from_strategy(const NonlocalGame& game,
                                       const std::vector<double>& strategy) {
    std::size_t y = game.answer_space();
    if (strategy.size() != game.question_space() * y) {
        throw ValidationError("strategy has the wrong shape");
    }
    std::size_t inputs = 1;
    std::vector<std::size_t> input_sizes(game.players());
    for (std::size_t i = 0; i < game.players(); ++i) {
        input_sizes[i] = game.question_sizes()[i] * game.answer_sizes()[i];
        inputs *= input_sizes[i];
    }
    std::vector<double> table(inputs * y, 0.0);
    for (std::size_t b = 0; b < inputs; ++b) {
        std::vector<std::size_t> parts = tuple_of_index(b, input_sizes);
        std::vector<std::size_t> x(game.players());
        for (std::size_t i = 0; i < game.players(); ++i) {
            x[i] = parts[i] / game.answer_sizes()[i];
        }
        std::size_t q = game.question_index(x);
        for (std::size_t a = 0; a < y; ++a) table[b * y + a] = strategy[q * y + a];
    }
    return Correlation(game, std::move(table));
}

PostProcessing::PostProcessing(const NonlocalGame& game, std::vector<std::vector<double>> tables)
    : tables_(std::move(tables)) {
    if (tables_.size() != game.players()) {
        throw ValidationError("post-processing needs one table per player");
    }
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        std::size_t x = game.question_sizes()[i], y = game.answer_sizes()[i];
        if (tables_[i].size() != x * y * y * y) {
            throw ValidationError("post-processing table for player " + std::to_string(i) +
                                  " has the wrong shape");
        }
        for (std::size_t slice = 0; slice < x * y * y; ++slice) {
            double sum = 0.0;
            for (std::size_t yb = 0; yb < y; ++yb) sum += tables_[i][slice * y + yb];
            if (std::abs(sum - 1.0) > kProbTolerance) {
                throw ValidationError("post-processing slice does not sum to 1");
            }
        }
    }
}

PostProcessing PostProcessing::pass_through(const NonlocalGame& game) {
    std::vector<std::vector<double>> tables(game.players());
    for (std::size_t i = 0; i < game.players(); ++i) {
        std::size_t x = game.question_sizes()[i], y = game.answer_sizes()[i];
        std::vector<double> t(x * y * y * y, 0.0);
        for (std::size_t xi = 0; xi < x; ++xi) {
            for (std::size_t yi = 0; yi < y; ++yi) {
                for (std::size_t yp = 0; yp < y; ++yp) {
                    t[((xi * y + yi) * y + yp) * y + yp] = 1.0;
                }
            }
        }
        tables[i] = std::move(t);
    }
    return PostProcessing(game, std::move(tables));
}

PostProcessing PostProcessing::keep_input_answer(const NonlocalGame& game) {
    std::vector<std::vector<double>> tables(game.players());
    for (std::size_t i = 0; i < game.players(); ++i) {
        std::size_t x = game.question_sizes()[i], y = game.answer_sizes()[i];
        std::vector<double> t(x * y * y * y, 0.0);
        for (std::size_t xi = 0; xi < x; ++xi) {
            for (std::size_t yi = 0; yi < y; ++yi) {
                for (std::size_t yp = 0; yp < y; ++yp) {
                    t[((xi * y + yi) * y + yp) * y + yi] = 1.0;
                }
            }
        }
        tables[i] = std::move(t);
    }
    return PostProcessing(game, std::move(tables));
}

double PostProcessing::apply(const NonlocalGame& game, std::size_t input_index,
                             std::size_t corr_answer, std::size_t final_answer) const {
    double prob = 1.0;
    // unpack per player from the slowest index outward
    std::size_t players = game.players();
    std::vector<std::size_t> b(players), yp(players), yb(players);
    std::size_t bi = input_index, ai = corr_answer, fi = final_answer;
    for (std::size_t i = players; i-- > 0;) {
        std::size_t in_size = game.question_sizes()[i] * game.answer_sizes()[i];
        b[i] = bi % in_size;
        bi /= in_size;
        yp[i] = ai % game.answer_sizes()[i];
        ai /= game.answer_sizes()[i];
        yb[i] = fi % game.answer_sizes()[i];
        fi /= game.answer_sizes()[i];
    }
    for (std::size_t i = 0; i < players; ++i) {
        std::size_t y = game.answer_sizes()[i];
        std::size_t xi = b[i] / y, yi = b[i] % y;
        prob *= tables_[i][(((xi * y + yi) * y + yp[i]) * y) + yb[i]];
        if (prob == 0.0) return 0.0;
    }
    return prob;
}

Mac assisted_mac(const NonlocalGame& game, const Correlation& corr, const PostProcessing& post) {
    if (game.players() != 2) {
        throw ValidationError("assisted_mac shapes a two-sender MAC");
    }
    std::size_t d1 = game.question_sizes()[0] * game.answer_sizes()[0];
    std::size_t d2 = game.question_sizes()[1] * game.answer_sizes()[1];
    std::size_t d = game.question_space();
    std::size_t y_total = game.answer_space();
    std::size_t b_total = d1 * d2;

    std::vector<double> base = game_mac_transition(game);
    std::vector<double> composed(d * b_total, 0.0);
    for (std::size_t b = 0; b < b_total; ++b) {
        std::size_t b1 = b / d2, b2 = b % d2;
        std::size_t x1 = b1 / game.answer_sizes()[0];
        std::size_t x2 = b2 / game.answer_sizes()[1];
        // questions pass through unchanged; only the answer block varies
        for (std::size_t ybar = 0; ybar < y_total; ++ybar) {
            double mass = 0.0;
            for (std::size_t yp = 0; yp < y_total; ++yp) {
                double pc = corr.at(b, yp);
                if (pc == 0.0) continue;
                mass += pc * post.apply(game, b, yp, ybar);
            }
            if (mass == 0.0) continue;
            std::vector<std::size_t> yb_tuple = game.answer_tuple(ybar);
            std::size_t bbar1 = x1 * game.answer_sizes()[0] + yb_tuple[0];
            std::size_t bbar2 = x2 * game.answer_sizes()[1] + yb_tuple[1];
            std::size_t bbar = bbar1 * d2 + bbar2;
            for (std::size_t z = 0; z < d; ++z) {
                composed[z * b_total + b] += mass * base[z * b_total + bbar];
            }
        }
    }
    return Mac(d1, d2, d, std::move(composed));
}

std::vector<double> WinningVector::apply(const ProbabilityVector& pi) const {
    if (pi.dim() != w.size()) throw ValidationError("winning vector and pi disagree on d");
    double win = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) win += pi[i] * w[i];
    double lose_share = (1.0 - win) / static_cast<double>(w.size());
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] * pi[i] + lose_share;
    return out;
}

double deterministic_max_mi(std::size_t d, std::size_t k) {
    if (d < 1) throw DomainError("deterministic_max_mi needs d >= 1");
    if (k > d) throw DomainError("deterministic_max_mi needs K <= d");
    if (k == 0) return 0.0;
    double dd = static_cast<double>(d);
    if (k == d) return std::log(dd);
    double delta_k = static_cast<double>(d - k) * std::pow(dd, -dd / static_cast<double>(d - k));
    return std::log(static_cast<double>(k) + delta_k);
}

double mi_given_winning_vector(const WinningVector& w, const ProbabilityVector& pi) {
    for (double wi : w.w) {
        if (!(wi >= 0.0 && wi <= 1.0)) throw ValidationError("winning vector entries in [0,1]");
    }
    std::vector<double> out = w.apply(pi);
    double win = 0.0;
    for (std::size_t i = 0; i < w.dim(); ++i) win += pi[i] * w.w[i];
    double ln_d = std::log(static_cast<double>(w.dim()));
    return entropy_nats(out) + win * ln_d - ln_d;
}

double istar_positive_w(const WinningVector& w) {
    double inv_sum = 0.0;
    for (double wi : w.w) {
        if (!(wi > 0.0)) {
            throw DomainError("istar_positive_w needs w > 0; route zero entries through "
                              "deterministic_max_mi(d, d - 1)");
        }
        if (wi > 1.0) throw DomainError("winning vector entries must lie in (0, 1]");
        inv_sum += 1.0 / wi;
    }
    double d = static_cast<double>(w.dim());
    double w_eff = 1.0 / inv_sum;
    double ln_d = std::log(d);
    double sum = 0.0;
    for (double wi : w.w) {
        sum += std::exp(d * w_eff * ln_d * (1.0 - 1.0 / wi));
    }
    return std::log(sum);
}

double correlation_bound(std::size_t d, double omega) {
    if (d < 2) throw DomainError("correlation_bound needs d >= 2");
    if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("omega must lie in [0, 1]");
    double dd = static_cast<double>(d);
    return std::log(dd - 1.0 + std::pow(dd, -(1.0 - omega) * dd));
}

double promise_free_winning_prob(double omega_promise, std::size_t promise_size,
                                 std::size_t question_space) {
    if (promise_size > question_space) {
        throw DomainError("promise cannot exceed the question space");
    }
    if (!(omega_promise >= 0.0 && omega_promise <= 1.0)) {
        throw DomainError("omega must lie in [0, 1]");
    }
    double ratio = static_cast<double>(promise_size) / static_cast<double>(question_space);
    return ratio * omega_promise + (1.0 - ratio);
}

namespace {

struct StrategySearchResult {
    std::size_t best_wins = 0;
    std::vector<std::size_t> best_key;  // concatenated answer functions
    bool any = false;
};

// Odometer over player-1 answer functions; deeper players are enumerated
// inside. key = concatenation of all answer tables, compared lexicographically.
void search_range(const NonlocalGame& game, std::size_t begin, std::size_t end,
                  StrategySearchResult& result) {
    std::size_t players = game.players();
    const auto& qs = game.question_sizes();
    const auto& as = game.answer_sizes();

    std::vector<std::vector<std::size_t>> fn(players);
    for (std::size_t i = 0; i < players; ++i) fn[i].assign(qs[i], 0);

    std::vector<std::size_t> per_player_count(players, 1);
    for (std::size_t i = 0; i < players; ++i) {
        std::size_t c = 1;
        for (std::size_t x = 0; x < qs[i]; ++x) c *= as[i];
        per_player_count[i] = c;
    }

    auto decode = [&](std::size_t i, std::size_t code) {
        for (std::size_t x = qs[i]; x-- > 0;) {
            fn[i][x] = code % as[i];
            code /= as[i];
        }
    };

    std::size_t rest_count = 1;
    for (std::size_t i = 1; i < players; ++i) rest_count *= per_player_count[i];

    std::vector<std::size_t> q_tuple, a_tuple(players);
    for (std::size_t code1 = begin; code1 < end; ++code1) {
        decode(0, code1);
        for (std::size_t rest = 0; rest < rest_count; ++rest) {
            std::size_t r = rest;
            for (std::size_t i = players; i-- > 1;) {
                decode(i, r % per_player_count[i]);
                r /= per_player_count[i];
            }
            std::size_t wins = 0;
            for (std::size_t q = 0; q < game.question_space(); ++q) {
                q_tuple = game.question_tuple(q);
                for (std::size_t i = 0; i < players; ++i) a_tuple[i] = fn[i][q_tuple[i]];
                if (game.wins(q, game.answer_index(a_tuple))) ++wins;
            }
            if (wins > result.best_wins || !result.any) {
                result.best_wins = wins;
                result.best_key.clear();
                for (std::size_t i = 0; i < players; ++i) {
                    result.best_key.insert(result.best_key.end(), fn[i].begin(), fn[i].end());
                }
                result.any = true;
            }
        }
    }
}

}  // namespace

ClassicalStrategyReport classical_winning_prob(const NonlocalGame& game,
                                               const EnumerationOptions& opts) {
    double count = 1.0;
    for (std::size_t i = 0; i < game.players(); ++i) {
        count *= std::pow(static_cast<double>(game.answer_sizes()[i]),
                          static_cast<double>(game.question_sizes()[i]));
    }
    if (count > opts.ceiling) {
        throw RefusalError("deterministic strategy count " + std::to_string(count) +
                               " exceeds ceiling " + std::to_string(opts.ceiling),
                           count);
    }

    std::size_t first_count = 1;
    for (std::size_t x = 0; x < game.question_sizes()[0]; ++x) {
        first_count *= game.answer_sizes()[0];
    }

    unsigned workers =
        opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, first_count));

    std::vector<StrategySearchResult> results(workers);
    if (workers <= 1) {
        search_range(game, 0, first_count, results[0]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            std::size_t begin = first_count * w / workers;
            std::size_t end = first_count * (w + 1) / workers;
            pool.emplace_back(search_range, std::cref(game), begin, end,
                              std::ref(results[w]));
        }
        for (auto& t : pool) t.join();
    }

    // chunks are scanned in lexicographic order, so the first strict maximum
    // across them is the lowest-lexicographic witness
    StrategySearchResult best;
    for (const auto& r : results) {
        if (!r.any) continue;
        if (!best.any || r.best_wins > best.best_wins) {
            best = r;
        }
    }

    ClassicalStrategyReport report;
    report.omega = static_cast<double>(best.best_wins) / static_cast<double>(game.question_space());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < game.players(); ++i) {
        std::size_t n = game.question_sizes()[i];
        report.answer_functions.emplace_back(best.best_key.begin() + offset,
                                             best.best_key.begin() + offset + n);
        offset += n;
    }
    return report;
}

double full_communication_winning_prob(const NonlocalGame& game) {
    std::size_t answerable = 0;
    for (std::size_t q = 0; q < game.question_space(); ++q) {
        for (std::size_t a = 0; a < game.answer_space(); ++a) {
            if (game.wins(q, a)) {
                ++answerable;
                break;
            }
        }
    }
    return static_cast<double>(answerable) / static_cast<double>(game.question_space());
}

double quantum_winning_prob(const std::string& builtin_name) {
    if (builtin_name == "chsh") return 0.5 * (1.0 + 1.0 / std::sqrt(2.0));
    if (builtin_name == "magic_square") return 1.0;
    if (builtin_name == "multiparty_parity") return 1.0;
    throw DomainError("no recorded quantum winning probability for '" + builtin_name + "'");
}

}  // namespace macap
