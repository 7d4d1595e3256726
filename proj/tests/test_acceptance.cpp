// Acceptance suite: every criterion runs at its stated tolerance and prints
// one pass/fail line. Failures also fail the doctest assertions, with the
// sub-check labels in the output.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "macap/capacity.hpp"
#include "macap/games.hpp"
#include "macap/io.hpp"
#include "macap/nosignalling.hpp"
#include "macap/optimize.hpp"
#include "test_util.hpp"

using namespace macap;
using namespace macap::testutil;

namespace {

const double kLn2 = std::log(2.0);

struct Criterion {
    int number;
    std::string title;
    std::vector<std::pair<std::string, bool>> checks;

    Criterion(int n, std::string t) : number(n), title(std::move(t)) {}

    void check(const std::string& label, bool ok) { checks.emplace_back(label, ok); }

    void finish() {
        bool all = true;
        for (const auto& [label, ok] : checks) all = all && ok;
        std::printf("criterion %d (%s): %s\n", number, title.c_str(), all ? "PASS" : "FAIL");
        std::fflush(stdout);
        for (const auto& [label, ok] : checks) {
            INFO("criterion ", number, ": ", label);
            CHECK(ok);
        }
    }
};

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

double run_cli_value(const std::string& args, const std::string& key, int* exit_code = nullptr) {
    std::string cmd = std::string(MACAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    if (exit_code) *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " ", 0) == 0) return std::stod(line.substr(key.size() + 1));
    }
    return std::nan("");
}

double l2_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("criterion 1: noise-free example 1") {
    Stopwatch timer;
    Criterion c(1, "noise-free example 1");
    auto sum = sum_capacity_d2_binary(noise_free_1(), StopRule::precision(0.01));
    c.check("sum capacity 0.2231 +- 0.01", std::abs(sum.value - 0.2231) <= 0.01);
    double relaxed = relaxed_sum_capacity(noise_free_1(), 1e-5);
    c.check("relaxed capacity 0.2231 +- 1e-4", std::abs(relaxed - 0.2231) <= 1e-4);
    c.check("runtime < 5 s", timer.seconds() < 5.0);
    c.finish();
}

TEST_CASE("criterion 2: noise-free example 2") {
    Stopwatch timer;
    Criterion c(2, "noise-free example 2");
    auto sum = sum_capacity_d2_binary(noise_free_2(), StopRule::precision(0.01));
    c.check("sum capacity 0.3466 +- 0.01", std::abs(sum.value - 0.3466) <= 0.01);
    double relaxed = relaxed_sum_capacity(noise_free_2(), 5e-7);
    c.check("relaxed capacity ln 2 +- 1e-6", std::abs(relaxed - kLn2) <= 1e-6);
    c.check("gap to the relaxed bound is visible", relaxed - sum.value > 0.3);
    c.check("runtime < 5 s", timer.seconds() < 5.0);
    c.finish();
}

TEST_CASE("criterion 3: bound table in bits") {
    Criterion c(3, "bound table reproduction");
    auto bits = [](std::size_t d, double omega) {
        return from_nats(correlation_bound(d, omega), LogBase::bits);
    };
    c.check("correlation_bound(9, 8/9) = 3.02 +- 0.005",
            std::abs(bits(9, 8.0 / 9.0) - 3.02) <= 0.005);
    c.check("correlation_bound(4, 3/4) = 1.70 +- 0.005", std::abs(bits(4, 0.75) - 1.70) <= 0.005);
    c.check("correlation_bound(4, (1+1/sqrt 2)/2) = 1.78 +- 0.005",
            std::abs(bits(4, 0.5 * (1.0 + 1.0 / std::sqrt(2.0))) - 1.78) <= 0.005);
    // 2.84 is the reference figure for this row, but the bound formula
    // gives ln(7 + 8^{-1})/ln 2 = 2.833. Asserted as given; see README.
    c.check("correlation_bound(8, 7/8) = 2.84 +- 0.005",
            std::abs(bits(8, 7.0 / 8.0) - 2.84) <= 0.005);
    c.finish();
}

TEST_CASE("criterion 4: brute-force classical winning probabilities") {
    Criterion c(4, "classical winning probabilities");
    {
        Stopwatch t;
        c.check("chsh = 3/4", classical_winning_prob(chsh()).omega == 0.75);
        c.check("chsh < 60 s", t.seconds() < 60.0);
    }
    {
        Stopwatch t;
        c.check("magic square = 8/9",
                std::abs(classical_winning_prob(magic_square()).omega - 8.0 / 9.0) < 1e-15);
        c.check("magic square < 60 s", t.seconds() < 60.0);
    }
    {
        Stopwatch t;
        double promise_value = 0.5 + std::pow(2.0, -2.0);  // on-promise optimum for N = 3
        double converted = promise_free_winning_prob(promise_value, 4, 8);
        c.check("multiparty parity promise-free = 7/8", converted == 0.875);
        c.check("enumeration agrees with the conversion",
                classical_winning_prob(multiparty_parity(3)).omega == converted);
        c.check("multiparty parity < 60 s", t.seconds() < 60.0);
    }
    {
        Stopwatch t;
        c.check("signalling(2,2) = 1/2", classical_winning_prob(signalling(2, 2)).omega == 0.5);
        c.check("signalling < 60 s", t.seconds() < 60.0);
    }
    c.finish();
}

TEST_CASE("criterion 5: no-signalling linear programs") {
    Criterion c(5, "no-signalling LP values");
    {
        Stopwatch t;
        c.check("chsh ns value 1 +- 1e-6",
                std::abs(max_ns_winning_prob(chsh()).omega - 1.0) <= 1e-6);
        c.check("chsh < 30 s", t.seconds() < 30.0);
    }
    for (std::size_t m1 = 2; m1 <= 4; ++m1) {
        for (std::size_t m2 = 2; m2 <= 4; ++m2) {
            Stopwatch t;
            double omega = max_ns_winning_prob(signalling(m1, m2)).omega;
            double expected = 1.0 / static_cast<double>(std::max(m1, m2));
            std::string label = "signalling(" + std::to_string(m1) + "," + std::to_string(m2) +
                                ") = 1/max +- 1e-6";
            c.check(label, std::abs(omega - expected) <= 1e-6);
            c.check(label + " < 30 s", t.seconds() < 30.0);
        }
    }
    c.finish();
}

TEST_CASE("criterion 6: simplex maximization table at desk scale") {
    Stopwatch timer;
    Criterion c(6, "grid and dense-curve table");

    auto sin_norm = [](const std::vector<double>& x) { return std::sin(l2_norm(x)); };
    auto cubic = [](const std::vector<double>& x) {
        double r = l2_norm(x);
        return -r * r * r / 6.0 + r * r / 4.0 - r / (6.0 * M_PI);
    };
    // term-wise Lipschitz constants: |sin'| = 1; cubic terms 1/2 + 1/2 + 1/(6 pi)
    Modulus beta_sin = Modulus::linear(1.0);
    Modulus beta_cubic = Modulus::linear(1.0 + 1.0 / (6.0 * M_PI));

    auto grid_sin = maximize_grid(sin_norm, beta_sin, 3, 0.15, 2);
    auto grid_cubic = maximize_grid(cubic, beta_cubic, 3, 0.15, 2);
    auto dense_sin = maximize_dense_curve(sin_norm, beta_sin, 3, 0.15);
    auto dense_cubic = maximize_dense_curve(cubic, beta_cubic, 3, 0.15);

    c.check("grid sin value within 0.15 of 0.841", std::abs(grid_sin.best_value - 0.841) <= 0.15);
    c.check("grid cubic value within 0.15 of 0.033",
            std::abs(grid_cubic.best_value - 0.033) <= 0.15);
    c.check("dense sin value within 0.15 of 0.841",
            std::abs(dense_sin.best_value - 0.841) <= 0.15);
    c.check("dense cubic value within 0.15 of 0.033",
            std::abs(dense_cubic.best_value - 0.033) <= 0.15);

    double delta_sin = largest_step(beta_sin, 0.075, 2.0);
    std::uint64_t n_sin = static_cast<std::uint64_t>(std::ceil(1.0 / (delta_sin * delta_sin)));
    c.check("grid sin iterations equal binomial(N+2, 2)",
            grid_sin.iterations == binomial(n_sin + 2, 2));
    double delta_cubic = largest_step(beta_cubic, 0.075, 2.0);
    std::uint64_t n_cubic =
        static_cast<std::uint64_t>(std::ceil(1.0 / (delta_cubic * delta_cubic)));
    c.check("grid cubic iterations equal binomial(N+2, 2)",
            grid_cubic.iterations == binomial(n_cubic + 2, 2));

    c.check("grid sin iterations within 5% of 16290",
            std::abs(static_cast<double>(grid_sin.iterations) - 16290.0) <= 0.05 * 16290.0);
    c.check("grid cubic iterations within 5% of 19900",
            std::abs(static_cast<double>(grid_cubic.iterations) - 19900.0) <= 0.05 * 19900.0);

    c.check("dense sin uses fewer iterations than grid",
            dense_sin.iterations < grid_sin.iterations);
    c.check("dense cubic uses fewer iterations than grid",
            dense_cubic.iterations < grid_cubic.iterations);

    c.check("runtime < 2 min", timer.seconds() < 120.0);
    c.finish();
}

TEST_CASE("criterion 7: PR-assisted CHSH") {
    Criterion c(7, "PR-assisted CHSH mutual information");
    NonlocalGame game = chsh();
    Mac assisted =
        assisted_mac(game, Correlation::pr_box(game), PostProcessing::pass_through(game));
    double mi = mutual_information(assisted, ProbabilityVector::uniform(4),
                                   ProbabilityVector::uniform(4), LogBase::bits);
    c.check("mutual information 2.0 bits +- 1e-9", std::abs(mi - 2.0) <= 1e-9);
    c.check("equals log2 d", std::abs(mi - std::log2(4.0)) <= 1e-9);
    c.finish();
}

TEST_CASE("criterion 8: property suites") {
    Criterion c(8, "property suites");

    {  // sawtooth soundness and iteration ceiling, 50 random Lipschitz functions
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> amp(-1.0, 1.0), freq(0.5, 9.0), phase(0.0, 6.283);
        std::uniform_real_distribution<double> qs(0.0, 1.0);
        bool sound = true, ceiling_ok = true, within_eps = true;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> a(5), w(5), ph(5);
            double lip = 0.0;
            for (int j = 0; j < 5; ++j) {
                a[j] = amp(rng);
                w[j] = freq(rng);
                ph[j] = phase(rng);
                lip += std::abs(a[j] * w[j]);
            }
            auto f = [&](double x) {
                double s = 0.0;
                for (int j = 0; j < 5; ++j) s += a[j] * std::sin(w[j] * x + ph[j]);
                return s;
            };
            double eps = 0.05 * std::max(lip, 0.5);
            Modulus beta = Modulus::linear(lip);
            std::vector<double> samples(25);
            for (auto& q : samples) q = qs(rng);
            Maximize1dOptions opts;
            opts.observer = [&](const std::vector<SawtoothNode>& nodes) {
                for (double q : samples) {
                    double bound = 1e300;
                    for (const auto& node : nodes) {
                        bound = std::min(bound, node.f + beta(std::abs(q - node.q)));
                    }
                    if (bound < f(q) - 1e-9) sound = false;
                }
            };
            auto outcome = maximize_1d(f, beta, 0.0, 1.0, StopRule::precision(eps), opts);
            double delta = largest_step(beta, eps / 2.0, 1.0);
            if (outcome.iterations > static_cast<std::uint64_t>(std::ceil(1.0 / delta))) {
                ceiling_ok = false;
            }
            double ref = -1e300;
            for (int i = 0; i <= 4000; ++i) ref = std::max(ref, f(i / 4000.0));
            if (outcome.best_value < ref - eps - 1e-9) within_eps = false;
        }
        c.check("sawtooth bound stays above f", sound);
        c.check("iterations within ceil((b-a)/delta)", ceiling_ok);
        c.check("sawtooth value within eps of the brute-force maximum", within_eps);
    }

    {  // inner solver vs fine-grid oracle, 20 random MACs with d1 <= 4
        std::mt19937 rng(98);
        std::uniform_int_distribution<std::size_t> ds(2, 4);
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t d1 = 2 + static_cast<std::size_t>(trial % 3);
            Mac mac = random_mac(rng, d1, ds(rng), ds(rng));
            ProbabilityVector q = random_simplex(rng, mac.d2());
            EffectiveChannel eff = effective_channel(mac, q);
            auto report = inner_capacity(mac, q, 1e-6);
            auto objective = [&](const std::vector<double>& p) {
                double pz[4] = {0, 0, 0, 0};
                double cost = 0.0;
                for (std::size_t j = 0; j < eff.d1; ++j) {
                    for (std::size_t z = 0; z < eff.dout; ++z) pz[z] += eff.aq_at(z, j) * p[j];
                    cost += p[j] * eff.bq[j];
                }
                double h = 0.0;
                for (std::size_t z = 0; z < eff.dout; ++z) {
                    if (pz[z] > 0.0) h -= pz[z] * std::log(pz[z]);
                }
                return h - cost;
            };
            double oracle = grid_maximum(objective, d1, 1000);
            if (std::abs(report.value - oracle) > 2e-3) ok = false;
        }
        c.check("inner solver matches the step-1e-3 grid oracle within 2e-3", ok);
    }

    {  // grid adjacency and completeness for d <= 4, N <= 6
        bool ok = true;
        for (std::size_t d = 2; d <= 4 && ok; ++d) {
            for (std::size_t n = 1; n <= 6 && ok; ++n) {
                SimplexGrid grid(d, n);
                std::set<std::vector<std::uint64_t>> seen;
                std::vector<std::uint64_t> prev;
                SimplexGridIterator it(grid, 0);
                for (std::uint64_t i = 0; i < grid.size(); ++i, it.advance()) {
                    auto cur = it.coords();
                    std::uint64_t total = 0, dist = 0;
                    for (std::size_t j = 0; j < d; ++j) {
                        total += cur[j];
                        if (!prev.empty()) {
                            dist += cur[j] > prev[j] ? cur[j] - prev[j] : prev[j] - cur[j];
                        }
                    }
                    if (total != n) ok = false;
                    if (!prev.empty() && dist != 2) ok = false;
                    seen.insert(cur);
                    prev = cur;
                }
                if (seen.size() != grid.size()) ok = false;
                // brute-force composition enumeration must give the same set
                std::set<std::vector<std::uint64_t>> brute;
                std::vector<std::uint64_t> comp(d, 0);
                std::function<void(std::size_t, std::uint64_t)> rec =
                    [&](std::size_t i, std::uint64_t left) {
                        if (i + 1 == d) {
                            comp[i] = left;
                            brute.insert(comp);
                            return;
                        }
                        for (std::uint64_t v = 0; v <= left; ++v) {
                            comp[i] = v;
                            rec(i + 1, left - v);
                        }
                    };
                rec(0, n);
                if (brute != seen) ok = false;
            }
        }
        c.check("equidistant grid: adjacency 2/N and completeness", ok);
    }

    {  // curve density at d = 3, N = 12
        SimplexGrid grid(3, 12);
        std::mt19937 rng(77);
        std::exponential_distribution<double> e(1.0);
        bool ok = true;
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> x(3);
            double sum = 0.0;
            for (auto& v : x) {
                v = e(rng);
                sum += v;
            }
            for (auto& v : x) v /= sum;
            double best = 1e300;
            SimplexGridIterator it(grid, 0);
            std::vector<double> g;
            for (std::uint64_t k = 0; k < grid.size(); ++k, it.advance()) {
                it.write_point(g);
                best = std::min(best, l1_distance(x, g));
            }
            if (best > 2.0 * 2.0 / 12.0 + 1e-12) ok = false;
        }
        c.check("curve samples lie within 2(d-1)/N of any simplex point", ok);
    }

    {  // Lipschitz-like property of I* sampled against beta_I
        std::mt19937 rng(314);
        std::uniform_int_distribution<std::size_t> ds(2, 4);
        bool ok = true;
        for (int trial = 0; trial < 40; ++trial) {
            Mac mac = random_mac(rng, ds(rng), ds(rng), ds(rng));
            Modulus beta = beta_I_modulus(mac);
            ProbabilityVector q1 = random_simplex(rng, mac.d2());
            ProbabilityVector q2 = random_simplex(rng, mac.d2());
            double i1 = inner_capacity(mac, q1, 1e-7).value;
            double i2 = inner_capacity(mac, q2, 1e-7).value;
            double dist = 0.0;
            for (std::size_t i = 0; i < mac.d2(); ++i) dist += std::abs(q1[i] - q2[i]);
            if (std::abs(i1 - i2) > beta(dist) + 2e-7) ok = false;
        }
        c.check("I* respects beta_I on sampled pairs", ok);
    }

    {  // LP hierarchy on 20 random small games
        std::mt19937 rng(404);
        std::uniform_int_distribution<std::size_t> size(2, 3);
        std::bernoulli_distribution keep(0.35);
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::size_t> qs = {size(rng), size(rng)};
            std::vector<std::size_t> as = {size(rng), size(rng)};
            std::vector<std::pair<std::size_t, std::size_t>> winning;
            for (std::size_t q = 0; q < qs[0] * qs[1]; ++q) {
                for (std::size_t a = 0; a < as[0] * as[1]; ++a) {
                    if (keep(rng)) winning.emplace_back(q, a);
                }
            }
            NonlocalGame game(qs, as, std::move(winning));
            double cl = classical_winning_prob(game).omega;
            double ns = max_ns_winning_prob(game).omega;
            double fc = full_communication_winning_prob(game);
            if (!(cl <= ns + 1e-9 && ns <= fc + 1e-9)) ok = false;
        }
        c.check("omega_cl <= omega_ns <= omega_full-comm", ok);
    }

    {  // istar against the grid oracle within 5e-3
        std::mt19937 rng(17);
        std::uniform_int_distribution<std::size_t> dims(2, 4);
        std::uniform_real_distribution<double> u(0.4, 0.95);
        bool ok = true;
        for (int trial = 0; trial < 10; ++trial) {
            std::size_t d = dims(rng);
            WinningVector w;
            for (std::size_t i = 0; i < d; ++i) w.w.push_back(u(rng));
            auto objective = [&](const std::vector<double>& pi) {
                return mi_given_winning_vector(w, ProbabilityVector(pi));
            };
            double oracle = grid_maximum(objective, d, d == 4 ? 500 : 700);
            if (std::abs(istar_positive_w(w) - oracle) > 5e-3) ok = false;
        }
        c.check("istar_positive_w matches the grid oracle within 5e-3", ok);
    }

    c.finish();
}

TEST_CASE("criterion 9: bounded-mode upper bound through the CLI") {
    Criterion c(9, "bounded-mode guarantee");
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("macap_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string mac_path = (dir / "nf2.mac").string();
    write_mac_file(mac_path, noise_free_2());

    int code = 0;
    std::string args = "sum-capacity " + mac_path + " --max-iter 10 --base nats";
    double upper = run_cli_value(args, "upper_bound", &code);
    double value = run_cli_value(args, "value");
    c.check("cli exits cleanly", code == 0);
    c.check("upper_bound >= 0.3466 nats", upper >= 0.3466 - 1e-9);
    c.check("upper_bound >= best value", upper >= value);
    c.finish();
    fs::remove_all(dir);
}
