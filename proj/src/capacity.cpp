#include "macap/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "macap/modulus.hpp"

namespace macap {

namespace {

// Smallest mass an inner iterate may assign to a symbol; see floor_p below.
constexpr double kMinMass = 1e-12;

}  // namespace

std::string to_string(SumCapacityMethod method) {
    switch (method) {
        case SumCapacityMethod::piyavskii_shubert_d2: return "piyavskii_shubert_d2";
        case SumCapacityMethod::grid: return "grid";
        case SumCapacityMethod::dense_curve: return "dense_curve";
    }
    return "unknown";
}

InnerSolveReport solve_concave_channel(const std::vector<double>& a, std::size_t dout,
                                       std::size_t din, const std::vector<double>& b, double eps,
                                       const InnerSolveOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("inner solver needs a positive precision");

    InnerSolveReport report;
    if (din == 1) {
        std::vector<double> pz(a.begin(), a.end());
        report.value = entropy_nats(pz) - b[0];
        report.optimizer_p = {1.0};
        return report;
    }

    std::vector<double> p = opts.warm_start;
    if (p.size() != din) p.assign(din, 1.0 / static_cast<double>(din));
    // A zero entry can never re-enter the multiplicative update and would
    // pin the iterate to a sub-face, stalling the gap. Flooring keeps the
    // certificates exact: bound and value are computed from the actual p.
    auto floor_p = [&] {
        double norm = 0.0;
        for (double& v : p) {
            v = std::max(v, kMinMass);
            norm += v;
        }
        for (double& v : p) v /= norm;
    };
    floor_p();

    std::vector<double> pz(dout), d(din);
    double best_ub = std::numeric_limits<double>::infinity();
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> best_p = p;

    for (std::uint64_t t = 1; t <= opts.max_iterations; ++t) {
        std::fill(pz.begin(), pz.end(), 0.0);
        for (std::size_t z = 0; z < dout; ++z) {
            const double* row = a.data() + z * din;
            double s = 0.0;
            for (std::size_t j = 0; j < din; ++j) s += row[j] * p[j];
            pz[z] = s;
        }
        double val = 0.0, max_d = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < din; ++j) {
            double acc = 0.0;
            for (std::size_t z = 0; z < dout; ++z) {
                double az = a[z * din + j];
                if (az > 0.0) acc -= az * std::log(pz[z]);
            }
            d[j] = acc - b[j];
            val += p[j] * d[j];
            max_d = std::max(max_d, d[j]);
        }
        // max_j D_j(p) bounds the optimum for any p; track the tightest seen
        best_ub = std::min(best_ub, max_d);
        if (val > best_val) {
            best_val = val;
            best_p = p;
        }
        double gap = best_ub - best_val;
        if (opts.gap_trace) opts.gap_trace->push_back(gap);
        report.iterations = t;
        if (gap <= eps) {
            report.value = best_val;
            report.optimizer_p = best_p;
            report.gap = gap;
            return report;
        }
        for (std::size_t j = 0; j < din; ++j) p[j] *= std::exp(d[j] - max_d);
        floor_p();
    }
    throw ConvergenceError("inner solver: gap " + std::to_string(best_ub - best_val) +
                               " above target after " + std::to_string(opts.max_iterations) +
                               " iterations",
                           best_ub - best_val);
}

InnerSolveReport inner_capacity(const Mac& mac, const ProbabilityVector& q, double eps_inner,
                                const InnerSolveOptions& opts) {
    EffectiveChannel eff = effective_channel(mac, q);
    return solve_concave_channel(eff.aq, eff.dout, eff.d1, eff.bq, eps_inner, opts);
}

InnerSolveReport relaxed_sum_capacity_report(const Mac& mac, double eps,
                                             const InnerSolveOptions& opts) {
    std::size_t din = mac.d1() * mac.d2();
    std::vector<double> a(mac.dout() * din);
    std::vector<double> b(din);
    for (std::size_t b1 = 0; b1 < mac.d1(); ++b1) {
        for (std::size_t b2 = 0; b2 < mac.d2(); ++b2) {
            std::size_t j = b1 * mac.d2() + b2;
            for (std::size_t z = 0; z < mac.dout(); ++z) {
                a[z * din + j] = mac.at(z, b1, b2);
            }
            b[j] = mac.column_entropy(b1, b2);
        }
    }
    return solve_concave_channel(a, mac.dout(), din, b, eps, opts);
}

double relaxed_sum_capacity(const Mac& mac, double eps, const InnerSolveOptions& opts) {
    return relaxed_sum_capacity_report(mac, eps, opts).value;
}

namespace {

// Allocation-free inner solve for the hot loops of the outer searches.
// The generation tag keys the per-MAC cache to one outer-search call.
struct InnerScratch {
    std::uint64_t generation = 0;
    std::vector<double> col_entropy;
    std::vector<double> aq, bq, p, pz, d;
};

double inner_value_fast(const Mac& mac, std::uint64_t generation, const double* q, double eps,
                        std::uint64_t max_iter, InnerScratch& s) {
    std::size_t d1 = mac.d1(), d2 = mac.d2(), dout = mac.dout();
    if (s.generation != generation) {
        s.generation = generation;
        s.col_entropy.resize(d1 * d2);
        for (std::size_t b1 = 0; b1 < d1; ++b1) {
            for (std::size_t b2 = 0; b2 < d2; ++b2) {
                s.col_entropy[b1 * d2 + b2] = mac.column_entropy(b1, b2);
            }
        }
    }
    s.aq.assign(dout * d1, 0.0);
    s.bq.assign(d1, 0.0);
    for (std::size_t b1 = 0; b1 < d1; ++b1) {
        for (std::size_t b2 = 0; b2 < d2; ++b2) {
            double qb = q[b2];
            if (qb == 0.0) continue;
            for (std::size_t z = 0; z < dout; ++z) {
                s.aq[z * d1 + b1] += mac.at(z, b1, b2) * qb;
            }
            s.bq[b1] += qb * s.col_entropy[b1 * d2 + b2];
        }
    }

    s.p.assign(d1, 1.0 / static_cast<double>(d1));
    s.pz.resize(dout);
    s.d.resize(d1);
    double best_ub = std::numeric_limits<double>::infinity();
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 1; t <= max_iter; ++t) {
        for (std::size_t z = 0; z < dout; ++z) {
            const double* row = s.aq.data() + z * d1;
            double acc = 0.0;
            for (std::size_t j = 0; j < d1; ++j) acc += row[j] * s.p[j];
            s.pz[z] = acc > 0.0 ? std::log(acc) : 0.0;  // log reused below
        }
        double val = 0.0, max_d = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d1; ++j) {
            double acc = 0.0;
            for (std::size_t z = 0; z < dout; ++z) {
                double az = s.aq[z * d1 + j];
                if (az > 0.0) acc -= az * s.pz[z];
            }
            s.d[j] = acc - s.bq[j];
            val += s.p[j] * s.d[j];
            max_d = std::max(max_d, s.d[j]);
        }
        best_ub = std::min(best_ub, max_d);
        best_val = std::max(best_val, val);
        if (best_ub - best_val <= eps) return best_val;
        double norm = 0.0;
        for (std::size_t j = 0; j < d1; ++j) {
            s.p[j] = std::max(s.p[j] * std::exp(s.d[j] - max_d), kMinMass);
            norm += s.p[j];
        }
        for (std::size_t j = 0; j < d1; ++j) s.p[j] /= norm;
    }
    throw ConvergenceError("inner solver: gap " + std::to_string(best_ub - best_val) +
                               " above target after " + std::to_string(max_iter) + " iterations",
                           best_ub - best_val);
}

// Nearest cached inner solution; multiplicative iterates stay strictly
// positive, so reusing one as a warm start is always valid.
class WarmStartCache {
public:
    std::vector<double> nearest(double s) const {
        if (cache_.empty()) return {};
        auto it = cache_.lower_bound(s);
        if (it == cache_.end()) return std::prev(it)->second;
        if (it == cache_.begin()) return it->second;
        auto below = std::prev(it);
        return (s - below->first) <= (it->first - s) ? below->second : it->second;
    }
    void store(double s, std::vector<double> p) { cache_[s] = std::move(p); }

private:
    std::map<double, std::vector<double>> cache_;
};

}  // namespace

SumCapacityReport sum_capacity_d2_binary(const Mac& mac, const StopRule& stop,
                                         const SumCapacityOptions& opts) {
    const Mac* channel = &mac;
    Mac swapped = mac;
    bool was_swapped = false;
    if (mac.d2() != 2) {
        if (mac.d1() != 2) {
            throw ValidationError(
                "sum_capacity_d2_binary needs an input alphabet of size 2; "
                "use the grid or dense_curve method instead");
        }
        swapped = mac.swap_inputs();
        channel = &swapped;
        was_swapped = true;
    }

    Modulus beta = Modulus::scaled(beta_I_modulus(*channel), 2.0);  // ||q_s - q_s'||_1 = 2|s - s'|
    double eps = stop.epsilon.value_or(1e-3);
    double delta = largest_step(beta, eps / 2.0, 1.0);
    double expected_iters = std::ceil(1.0 / delta);
    double eps_inner = std::max(eps / (8.0 * expected_iters), 1e-12);

    WarmStartCache cache;
    std::vector<double> last_p;
    auto objective = [&](double s) {
        ProbabilityVector q({s, 1.0 - s});
        InnerSolveOptions inner_opts;
        inner_opts.max_iterations = opts.inner_max_iterations;
        inner_opts.warm_start = cache.nearest(s);
        InnerSolveReport r = inner_capacity(*channel, q, eps_inner, inner_opts);
        cache.store(s, r.optimizer_p);
        last_p = r.optimizer_p;
        return r.value;
    };

    StopRule stop_1d;
    stop_1d.epsilon = std::max(eps - 2.0 * eps_inner, 0.5 * eps);
    if (stop.max_iterations) stop_1d.max_iterations = stop.max_iterations;
    if (opts.max_iterations) stop_1d.max_iterations = opts.max_iterations;

    OptimizationOutcome outcome = maximize_1d(objective, beta, 0.0, 1.0, stop_1d);

    SumCapacityReport report;
    report.value = outcome.best_value;
    report.method = SumCapacityMethod::piyavskii_shubert_d2;
    report.precision = eps;
    report.upper_bound = outcome.upper_bound + eps_inner;
    report.iterations = outcome.iterations;
    report.converged = outcome.converged;
    double s = outcome.best_point[0];
    report.outer_point = {s, 1.0 - s};
    InnerSolveOptions inner_opts;
    inner_opts.max_iterations = opts.inner_max_iterations;
    inner_opts.warm_start = cache.nearest(s);
    report.inner_point = inner_capacity(*channel, ProbabilityVector({s, 1.0 - s}), eps_inner,
                                        inner_opts)
                             .optimizer_p;
    if (was_swapped) std::swap(report.outer_point, report.inner_point);
    return report;
}

SumCapacityReport sum_capacity_general(const Mac& mac, SumCapacityMethod method, double eps,
                                       const SumCapacityOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("sum_capacity_general needs a positive precision");
    if (method == SumCapacityMethod::piyavskii_shubert_d2) {
        return sum_capacity_d2_binary(mac, StopRule::precision(eps), opts);
    }

    std::size_t d = mac.d2();
    if (d < 2) throw DomainError("outer search needs d2 >= 2");
    Modulus beta = beta_I_modulus(mac);

    double eps_inner;
    double eps_outer;
    double estimate;
    if (method == SumCapacityMethod::grid) {
        // a uniform under-estimate of I* shifts the grid max by at most
        // eps_inner, so half the budget per solve keeps the total within eps
        eps_outer = eps / 2.0;
        eps_inner = eps / 2.0;
        double delta = largest_step(beta, eps_outer / 2.0, 2.0);
        double n = std::ceil(1.0 / (delta * delta));
        estimate = 1.0;
        for (std::size_t i = 1; i < d; ++i) estimate *= (n + static_cast<double>(i)) / i;
    } else {
        eps_inner = eps / 8.0;
        eps_outer = eps - 2.0 * eps_inner;
        double alpha = largest_step(beta, eps_outer / 2.0, 2.0);
        double n = std::ceil(2.0 * static_cast<double>(d - 1) / alpha);
        double n_grid = 1.0;
        for (std::size_t i = 1; i < d; ++i) n_grid *= (n + static_cast<double>(i)) / i;
        double along = largest_step(Modulus::composed(beta, Modulus::capped_linear(1.0, 2.0)),
                                    eps_outer / 4.0, 2.0 / n * n_grid);
        estimate = std::ceil(2.0 * n_grid / (n * along));
    }
    if (estimate > opts.eval_ceiling) {
        throw RefusalError("estimated evaluation count " + std::to_string(estimate) +
                               " exceeds ceiling " + std::to_string(opts.eval_ceiling),
                           estimate);
    }

    static std::atomic<std::uint64_t> call_counter{0};
    const std::uint64_t generation = ++call_counter;
    auto objective = [&, generation](const std::vector<double>& q_raw) {
        thread_local InnerScratch scratch;
        return inner_value_fast(mac, generation, q_raw.data(), eps_inner,
                                opts.inner_max_iterations, scratch);
    };

    OptimizationOutcome outcome =
        method == SumCapacityMethod::grid
            ? maximize_grid(objective, beta, d, eps_outer, opts.threads)
            : maximize_dense_curve(objective, beta, d, eps_outer);

    SumCapacityReport report;
    report.value = outcome.best_value;
    report.method = method;
    report.precision = eps;
    report.upper_bound = outcome.upper_bound + eps_inner;
    report.iterations = outcome.iterations;
    report.converged = outcome.converged;
    report.outer_point = outcome.best_point;
    InnerSolveOptions inner_opts;
    inner_opts.max_iterations = opts.inner_max_iterations;
    report.inner_point =
        inner_capacity(mac, ProbabilityVector(outcome.best_point), eps_inner, inner_opts)
            .optimizer_p;
    return report;
}

}  // namespace macap
