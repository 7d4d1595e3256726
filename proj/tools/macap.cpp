#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macap/capacity.hpp"
#include "macap/io.hpp"
#include "macap/nosignalling.hpp"
#include "macap/optimize.hpp"

namespace {

using namespace macap;

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRefusal = 4;
constexpr int kExitNonConvergence = 5;

// Stable report keys, printed as "key value" lines or one JSON object.
// Numbers carry 12 significant digits either way.
class Report {
public:
    void set(const std::string& key, double value) {
        std::ostringstream ss;
        ss.precision(12);
        ss << value;
        entries_.emplace_back(key, ss.str());
    }
    void set(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, '"' + value + '"');
    }
    void set(const std::string& key, std::uint64_t value) {
        entries_.emplace_back(key, std::to_string(value));
    }
    void set(const std::string& key, bool value) {
        entries_.emplace_back(key, value ? "true" : "false");
    }

    void print(bool as_json) const {
        if (as_json) {
            std::cout << "{\n";
            for (std::size_t i = 0; i < entries_.size(); ++i) {
                std::cout << "  \"" << entries_[i].first << "\": " << entries_[i].second
                          << (i + 1 < entries_.size() ? "," : "") << "\n";
            }
            std::cout << "}\n";
        } else {
            for (const auto& [key, value] : entries_) {
                std::cout << key << " " << value << "\n";
            }
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

double eval_ceiling_from_env(double fallback) {
    const char* raw = std::getenv("MACAP_EVAL_CEILING");
    if (!raw) return fallback;
    try {
        return std::stod(raw);
    } catch (const std::logic_error&) {
        throw ParseError(std::string("MACAP_EVAL_CEILING: '") + raw + "' is not a number");
    }
}

struct CommonFlags {
    std::string base = "bits";
    bool json = false;
    unsigned threads = 1;

    LogBase log_base() const { return base == "nats" ? LogBase::nats : LogBase::bits; }
    double present(double nats) const { return from_nats(nats, log_base()); }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--base", flags.base, "Report unit: bits or nats")
        ->check(CLI::IsMember({"bits", "nats"}))
        ->capture_default_str();
    cmd->add_flag("--json", flags.json, "Machine-readable output");
    cmd->add_option("--threads", flags.threads,
                    "Worker cap for grid and enumeration work (0 = hardware)");
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report_capacity(const SumCapacityReport& r, const CommonFlags& flags, double wall) {
    Report out;
    out.set("command", std::string("sum-capacity"));
    out.set("method", to_string(r.method));
    out.set("value", flags.present(r.value));
    out.set("unit", flags.base);
    out.set("upper_bound", flags.present(r.upper_bound));
    out.set("precision", flags.present(r.precision));
    out.set("iterations", r.iterations);
    out.set("converged", r.converged);
    out.set("wall_time_s", wall);
    out.print(flags.json);
}

int run_sum_capacity(const std::string& path, const CommonFlags& flags, double eps,
                     std::optional<std::uint64_t> max_iter, const std::string& method,
                     std::uint64_t inner_max_iter) {
    Timer timer;
    Mac mac = parse_mac_file(path);
    SumCapacityOptions opts;
    opts.threads = flags.threads;
    opts.eval_ceiling = eval_ceiling_from_env(1e7);
    opts.inner_max_iterations = inner_max_iter;

    SumCapacityReport report;
    bool binary_side = mac.d1() == 2 || mac.d2() == 2;
    if (method == "auto" ? binary_side : method == "ps") {
        StopRule stop;
        stop.epsilon = eps;
        if (max_iter) stop.max_iterations = *max_iter;
        report = sum_capacity_d2_binary(mac, stop, opts);
    } else {
        std::string chosen = method == "auto" ? "grid" : method;
        report = sum_capacity_general(
            mac, chosen == "grid" ? SumCapacityMethod::grid : SumCapacityMethod::dense_curve, eps,
            opts);
    }
    report_capacity(report, flags, timer.seconds());
    return 0;
}

int run_relaxed(const std::string& path, const CommonFlags& flags, double eps,
                std::uint64_t inner_max_iter) {
    Timer timer;
    Mac mac = parse_mac_file(path);
    InnerSolveOptions opts;
    opts.max_iterations = inner_max_iter;
    InnerSolveReport report = relaxed_sum_capacity_report(mac, eps, opts);
    Report out;
    out.set("command", std::string("relaxed-capacity"));
    out.set("value", flags.present(report.value));
    out.set("unit", flags.base);
    out.set("upper_bound", flags.present(report.value + report.gap));
    out.set("precision", flags.present(eps));
    out.set("iterations", report.iterations);
    out.set("wall_time_s", timer.seconds());
    out.print(flags.json);
    return 0;
}

int run_game_mac(const std::string& game_spec, const std::string& output,
                 const CommonFlags& flags) {
    Timer timer;
    NonlocalGame game = parse_game_file(game_spec);
    Mac mac = build_game_mac(game);
    write_mac_file(output, mac);
    Report out;
    out.set("command", std::string("game-mac"));
    out.set("output", output);
    out.set("d1", static_cast<std::uint64_t>(mac.d1()));
    out.set("d2", static_cast<std::uint64_t>(mac.d2()));
    out.set("dout", static_cast<std::uint64_t>(mac.dout()));
    out.set("wall_time_s", timer.seconds());
    out.print(flags.json);
    return 0;
}

int run_bound(const std::string& game_spec, const CommonFlags& flags,
              std::optional<double> omega_flag, bool use_classical, bool use_ns,
              bool use_quantum) {
    Timer timer;
    NonlocalGame game = parse_game_file(game_spec);
    double omega;
    std::string source;
    if (omega_flag) {
        omega = *omega_flag;
        source = "flag";
    } else if (use_classical) {
        EnumerationOptions opts;
        opts.threads = flags.threads;
        opts.ceiling = eval_ceiling_from_env(1e7);
        omega = classical_winning_prob(game, opts).omega;
        source = "classical";
    } else if (use_ns) {
        NsOptions opts;
        opts.ceiling = eval_ceiling_from_env(1e7);
        omega = max_ns_winning_prob(game, opts).omega;
        source = "ns";
    } else if (use_quantum) {
        if (game_spec.rfind("builtin:", 0) != 0) {
            throw DomainError("--quantum needs a builtin game");
        }
        std::string name = game_spec.substr(8);
        omega = quantum_winning_prob(name.substr(0, name.find(':')));
        source = "quantum";
    } else {
        throw DomainError("bound needs --omega, --classical, --ns or --quantum");
    }
    double bound = correlation_bound(game.question_space(), omega);
    Report out;
    out.set("command", std::string("bound"));
    out.set("omega", omega);
    out.set("omega_source", source);
    out.set("value", flags.present(bound));
    out.set("unit", flags.base);
    out.set("wall_time_s", timer.seconds());
    out.print(flags.json);
    return 0;
}

int run_winning_prob(const std::string& game_spec, const std::string& model,
                     const CommonFlags& flags) {
    Timer timer;
    NonlocalGame game = parse_game_file(game_spec);
    double omega;
    if (model == "classical") {
        EnumerationOptions opts;
        opts.threads = flags.threads;
        opts.ceiling = eval_ceiling_from_env(1e7);
        omega = classical_winning_prob(game, opts).omega;
    } else if (model == "ns") {
        NsOptions opts;
        opts.ceiling = eval_ceiling_from_env(1e7);
        omega = max_ns_winning_prob(game, opts).omega;
    } else {
        omega = full_communication_winning_prob(game);
    }
    Report out;
    out.set("command", std::string("winning-prob"));
    out.set("model", model);
    out.set("value", omega);
    out.set("wall_time_s", timer.seconds());
    out.print(flags.json);
    return 0;
}

// Named demo objectives for the optimizer front end.
struct NamedFunction {
    FnVec f;
    double slope;  // l1 Lipschitz constant fed to the modulus
};

NamedFunction named_function(const std::string& name) {
    if (name == "sin-norm") {
        return {[](const std::vector<double>& x) {
                    double s = 0.0;
                    for (double v : x) s += v * v;
                    return std::sin(std::sqrt(s));
                },
                1.0};
    }
    if (name == "cubic-norm") {
        // term-wise Lipschitz constants on the simplex: 1/2 + 1/2 + 1/(6 pi)
        return {[](const std::vector<double>& x) {
                    double s = 0.0;
                    for (double v : x) s += v * v;
                    double r = std::sqrt(s);
                    return -r * r * r / 6.0 + r * r / 4.0 - r / (6.0 * M_PI);
                },
                1.0 + 1.0 / (6.0 * M_PI)};
    }
    throw DomainError("unknown test function '" + name + "'");
}

int run_optimize(const std::string& function, const std::string& method, std::size_t d,
                 double eps, const CommonFlags& flags) {
    Timer timer;
    NamedFunction fn = named_function(function);
    Modulus beta = Modulus::linear(fn.slope);
    if (d < 2) throw DomainError("optimize needs dimension >= 2");
    {
        double ceiling = eval_ceiling_from_env(1e7);
        double delta = largest_step(beta, eps / 2.0, 2.0);
        double estimate;
        if (method == "grid") {
            double n = std::ceil(1.0 / (delta * delta));
            estimate = 1.0;
            for (std::size_t i = 1; i < d; ++i) estimate *= (n + static_cast<double>(i)) / i;
        } else {
            double n = std::ceil(2.0 * static_cast<double>(d - 1) / delta);
            double n_grid = 1.0;
            for (std::size_t i = 1; i < d; ++i) n_grid *= (n + static_cast<double>(i)) / i;
            double along = largest_step(Modulus::composed(beta, Modulus::capped_linear(1.0, 2.0)),
                                        eps / 4.0, 2.0 / n * n_grid);
            estimate = std::ceil(2.0 * n_grid / (n * along));
        }
        if (estimate > ceiling) {
            throw RefusalError("estimated evaluation count " + std::to_string(estimate) +
                                   " exceeds ceiling " + std::to_string(ceiling),
                               estimate);
        }
    }
    OptimizationOutcome outcome = method == "grid"
                                      ? maximize_grid(fn.f, beta, d, eps, flags.threads)
                                      : maximize_dense_curve(fn.f, beta, d, eps);
    Report out;
    out.set("command", std::string("optimize"));
    out.set("function", function);
    out.set("method", method);
    out.set("value", outcome.best_value);
    out.set("upper_bound", outcome.upper_bound);
    out.set("iterations", outcome.iterations);
    out.set("converged", outcome.converged);
    out.set("wall_time_s", timer.seconds());
    out.print(flags.json);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum capacity of multiple access channels and nonlocal-game analytics"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* sum = app.add_subcommand("sum-capacity", "Sum capacity of a two-sender MAC");
    std::string sum_path;
    double sum_eps = 0.01;
    std::string sum_method = "auto";
    std::optional<std::uint64_t> sum_max_iter;
    std::uint64_t inner_max_iter = 10'000'000;
    sum->add_option("mac", sum_path, "MAC file")->required();
    sum->add_option("--eps", sum_eps, "Additive precision")->capture_default_str();
    sum->add_option("--method", sum_method, "auto, ps, grid or dense")
        ->check(CLI::IsMember({"auto", "ps", "grid", "dense"}))
        ->capture_default_str();
    std::uint64_t sum_max_iter_raw = 0;
    auto* max_iter_opt = sum->add_option("--max-iter", sum_max_iter_raw,
                                         "Bounded mode: stop after this many outer iterations "
                                         "and report the certified upper bound");
    sum->add_option("--inner-max-iter", inner_max_iter, "Inner solver iteration cap");
    add_common(sum, flags);

    auto* relaxed = app.add_subcommand("relaxed-capacity",
                                       "Capacity of the MAC as a point-to-point channel");
    std::string relaxed_path;
    double relaxed_eps = 1e-6;
    std::uint64_t relaxed_inner_max = 10'000'000;
    relaxed->add_option("mac", relaxed_path, "MAC file")->required();
    relaxed->add_option("--eps", relaxed_eps, "Additive precision")->capture_default_str();
    relaxed->add_option("--inner-max-iter", relaxed_inner_max, "Inner solver iteration cap");
    add_common(relaxed, flags);

    auto* gamemac = app.add_subcommand("game-mac", "Materialize the MAC of a nonlocal game");
    std::string gm_game, gm_output;
    gamemac->add_option("--game", gm_game, "Game file or builtin:<name>")->required();
    gamemac->add_option("-o,--output", gm_output, "Output MAC file")->required();
    add_common(gamemac, flags);

    auto* bound = app.add_subcommand("bound", "Correlation-assisted sum-rate bound of a game MAC");
    std::string bound_game;
    std::optional<double> bound_omega;
    bool bound_classical = false, bound_ns = false, bound_quantum = false;
    double bound_omega_raw = 0.0;
    bound->add_option("--game", bound_game, "Game file or builtin:<name>")->required();
    auto* omega_opt = bound->add_option("--omega", bound_omega_raw, "Winning probability");
    bound->add_flag("--classical", bound_classical, "Compute omega by strategy enumeration");
    bound->add_flag("--ns", bound_ns, "Compute omega by the no-signalling LP");
    bound->add_flag("--quantum", bound_quantum, "Use the recorded quantum value (builtins)");
    add_common(bound, flags);

    auto* winning = app.add_subcommand("winning-prob", "Maximum winning probability of a game");
    std::string wp_game, wp_model = "classical";
    winning->add_option("--game", wp_game, "Game file or builtin:<name>")->required();
    winning->add_option("--model", wp_model, "classical, ns or full-comm")
        ->check(CLI::IsMember({"classical", "ns", "full-comm"}))
        ->capture_default_str();
    add_common(winning, flags);

    auto* optimize = app.add_subcommand("optimize", "Maximize a named test function over the simplex");
    std::string opt_fn = "sin-norm", opt_method = "grid";
    std::size_t opt_d = 3;
    double opt_eps = 0.15;
    optimize->add_option("--function", opt_fn, "sin-norm or cubic-norm")
        ->check(CLI::IsMember({"sin-norm", "cubic-norm"}))
        ->capture_default_str();
    optimize->add_option("--method", opt_method, "grid or dense")
        ->check(CLI::IsMember({"grid", "dense"}))
        ->capture_default_str();
    optimize->add_option("-d,--dimension", opt_d, "Simplex dimension")->capture_default_str();
    optimize->add_option("--eps", opt_eps, "Additive precision")->capture_default_str();
    add_common(optimize, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    }

    try {
        if (max_iter_opt->count() > 0) sum_max_iter = sum_max_iter_raw;
        if (omega_opt->count() > 0) bound_omega = bound_omega_raw;
        if (sum->parsed()) {
            return run_sum_capacity(sum_path, flags, sum_eps, sum_max_iter, sum_method,
                                    inner_max_iter);
        }
        if (relaxed->parsed()) {
            return run_relaxed(relaxed_path, flags, relaxed_eps, relaxed_inner_max);
        }
        if (gamemac->parsed()) return run_game_mac(gm_game, gm_output, flags);
        if (bound->parsed()) {
            return run_bound(bound_game, flags, bound_omega, bound_classical, bound_ns,
                             bound_quantum);
        }
        if (winning->parsed()) return run_winning_prob(wp_game, wp_model, flags);
        if (optimize->parsed()) return run_optimize(opt_fn, opt_method, opt_d, opt_eps, flags);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const RefusalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRefusal;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
