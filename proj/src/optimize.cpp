#include "macap/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>

namespace macap {

double l1_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double l1_distance(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s;
}

double largest_step(const Modulus& beta, double target, double diameter) {
    if (!(target > 0.0)) throw DomainError("largest_step needs a positive target");
    if (!(diameter > 0.0)) throw DomainError("largest_step needs a positive diameter");
    if (beta(diameter) <= target) return diameter;
    double lo = 0.0, hi = diameter;
    for (int i = 0; i < 120 && hi - lo > 0.0; ++i) {
        double mid = 0.5 * (lo + hi);
        if (beta(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

namespace {

struct Node {
    double q;
    double f;
};

// Adjacent-cone crossing: the bound value is certified from the bracket
// endpoints, so root slack never undercuts the sawtooth.
struct IntervalRecord {
    double bound;     // valid upper bound for f on [left.q, right.q]
    double left_q;    // tie-break: leftmost interval wins
    double crossing;  // next iterate if this interval is chosen

    bool operator<(const IntervalRecord& other) const {
        if (bound != other.bound) return bound > other.bound;
        return left_q < other.left_q;
    }
};

IntervalRecord make_interval(const Node& l, const Node& r, const Modulus& beta, double x_tol) {
    // g(q) = [f_l + beta(q - q_l)] - [f_r + beta(q_r - q)] is monotone
    // increasing with g(q_l) <= 0 <= g(q_r)
    double lo = l.q, hi = r.q;
    auto g = [&](double q) { return (l.f + beta(q - l.q)) - (r.f + beta(r.q - q)); };
    while (hi - lo > x_tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double bound = std::min(l.f + beta(hi - l.q), r.f + beta(r.q - lo));
    // keep the iterate strictly interior so it always splits the interval
    double crossing = std::clamp(0.5 * (lo + hi), std::nextafter(l.q, r.q),
                                 std::nextafter(r.q, l.q));
    return {bound, l.q, crossing};
}

double checked_eval(const Fn1d& f, double q) {
    double v = f(q);
    if (!std::isfinite(v)) {
        throw EvaluationError("objective returned a non-finite value at q = " + std::to_string(q));
    }
    return v;
}

}  // namespace

OptimizationOutcome maximize_1d(const Fn1d& f, const Modulus& beta, double a, double b,
                                const StopRule& stop, const Maximize1dOptions& opts) {
    if (!(a < b)) throw DomainError("maximize_1d needs a < b");
    if (!stop.epsilon && !stop.max_iterations) {
        throw DomainError("maximize_1d needs a precision or an iteration cap");
    }
    if (stop.epsilon && !(*stop.epsilon > 0.0)) {
        throw DomainError("maximize_1d needs a positive precision");
    }

    std::map<double, double> nodes;  // q -> f(q)
    std::set<IntervalRecord> intervals;

    auto notify = [&]() {
        if (!opts.observer) return;
        std::vector<SawtoothNode> snapshot;
        snapshot.reserve(nodes.size());
        for (const auto& [q, fv] : nodes) snapshot.push_back({q, fv});
        opts.observer(snapshot);
    };

    OptimizationOutcome out;
    double fa = checked_eval(f, a);
    double fb = checked_eval(f, b);
    out.best_value = std::max(fa, fb);
    out.best_point = {fa >= fb ? a : b};
    nodes[a] = fa;
    nodes[b] = fb;
    notify();

    auto x_tol = [&](std::uint64_t k) {
        double cap = 1e-10 * (b - a);
        if (stop.epsilon) cap = std::min(*stop.epsilon / (8.0 * static_cast<double>(k)), cap);
        return cap;
    };

    intervals.insert(make_interval({a, fa}, {b, fb}, beta, x_tol(1)));

    while (true) {
        const IntervalRecord top = *intervals.begin();
        out.upper_bound = top.bound;
        if (stop.max_iterations && out.iterations >= *stop.max_iterations) break;

        double q_star = top.crossing;
        double f_star = checked_eval(f, q_star);
        ++out.iterations;
        if (f_star > out.best_value) {
            out.best_value = f_star;
            out.best_point = {q_star};
        }
        if (stop.epsilon && top.bound - f_star <= *stop.epsilon) {
            out.converged = true;
            break;
        }

        intervals.erase(intervals.begin());
        auto [it, inserted] = nodes.emplace(q_star, f_star);
        if (inserted) {
            auto right = std::next(it);
            auto left = std::prev(it);
            double tol = x_tol(out.iterations + 1);
            intervals.insert(make_interval({left->first, left->second},
                                           {it->first, it->second}, beta, tol));
            intervals.insert(make_interval({it->first, it->second},
                                           {right->first, right->second}, beta, tol));
        }
        // duplicate crossing (root collapsed onto a node): the stale interval
        // is already erased, nothing to split
        notify();
        if (intervals.empty()) {
            out.converged = stop.epsilon.has_value();
            out.upper_bound = out.best_value;
            break;
        }
    }

    out.upper_bound = std::max(out.upper_bound, out.best_value);
    return out;
}

OptimizationOutcome maximize_grid(const FnVec& f, const Modulus& beta, std::size_t d, double eps,
                                  unsigned threads) {
    if (d < 2) throw DomainError("maximize_grid needs dimension >= 2");
    if (!(eps > 0.0)) throw DomainError("maximize_grid needs a positive precision");
    double delta = largest_step(beta, eps / 2.0, 2.0);
    std::size_t n = static_cast<std::size_t>(std::ceil(1.0 / (delta * delta)));
    SimplexGrid grid(d, std::max<std::size_t>(n, 1));

    std::uint64_t total = grid.size();
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, total));

    struct Chunk {
        double best = -std::numeric_limits<double>::infinity();
        std::uint64_t best_index = 0;
        std::exception_ptr error;
    };
    std::vector<Chunk> chunks(workers);

    auto scan = [&](unsigned w) {
        Chunk& c = chunks[w];
        try {
            std::uint64_t begin = total * w / workers;
            std::uint64_t end = total * (w + 1) / workers;
            SimplexGridIterator it(grid, begin);
            std::vector<double> x;
            for (std::uint64_t i = begin; i < end; ++i, it.advance()) {
                it.write_point(x);
                double v = f(x);
                if (!std::isfinite(v)) {
                    throw EvaluationError("objective returned a non-finite value at grid index " +
                                          std::to_string(i));
                }
                if (v > c.best) {
                    c.best = v;
                    c.best_index = i;
                }
            }
        } catch (...) {
            c.error = std::current_exception();
        }
    };

    if (workers <= 1) {
        scan(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
        for (auto& t : pool) t.join();
    }

    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_index = 0;
    for (const Chunk& c : chunks) {
        if (c.error) std::rethrow_exception(c.error);
        if (c.best > best) {  // chunks are in index order, so ties keep the lowest index
            best = c.best;
            best_index = c.best_index;
        }
    }

    OptimizationOutcome out;
    out.best_value = best;
    out.best_point = grid.point(best_index).entries();
    out.upper_bound = best + eps;
    out.iterations = total;
    out.converged = true;
    return out;
}

OptimizationOutcome maximize_dense_curve(const FnVec& f, const Modulus& beta, std::size_t d,
                                         double eps, const StopRule& stop_1d) {
    if (d < 2) throw DomainError("maximize_dense_curve needs dimension >= 2");
    if (!(eps > 0.0)) throw DomainError("maximize_dense_curve needs a positive precision");
    double alpha = largest_step(beta, eps / 2.0, 2.0);
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * static_cast<double>(d - 1) / alpha));
    SimplexCurve curve{SimplexGrid(d, std::max<std::size_t>(n, 1))};

    Modulus along = Modulus::composed(beta, Modulus::capped_linear(1.0, 2.0));
    Fn1d g = [&](double theta) { return f(curve.point(theta).entries()); };

    StopRule stop = stop_1d;
    if (!stop.epsilon && !stop.max_iterations) stop.epsilon = eps / 2.0;
    OptimizationOutcome out = maximize_1d(g, along, 0.0, curve.length(), stop);

    double density = 2.0 * static_cast<double>(d - 1) / static_cast<double>(curve.grid().n());
    out.upper_bound += beta(density);  // off-curve slack
    out.best_point = curve.point(out.best_point[0]).entries();
    return out;
}

double extend(const ExtensionSpec& spec, const std::vector<double>& x) {
    std::vector<double> projected = spec.projector(x);
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - projected[i];
    double dist = spec.norm ? spec.norm(diff) : l1_norm(diff);
    return spec.f(projected) - spec.beta(dist);
}

Modulus extended_modulus(const ExtensionSpec& spec) {
    double c = spec.norm_c2 / spec.norm_c1;
    return Modulus::custom("extended", [beta = spec.beta, kappa = spec.kappa, c](double x) {
        return beta(c * x) + kappa((c + 1.0) * x);
    });
}

HypercubeCurve::HypercubeCurve(std::vector<Interval> bounds, double eta)
    : bounds_(std::move(bounds)) {
    std::size_t d = bounds_.size();
    if (d < 2) throw DomainError("hypercube curve needs dimension >= 2");
    if (!(eta > 0.0)) throw DomainError("hypercube curve needs eta > 0");
    freq_.assign(d, 1.0);
    for (std::size_t i = 1; i < d; ++i) {
        double span = std::abs(bounds_[i].lo) + std::abs(bounds_[i].hi);
        if (!(span > 0.0)) {
            throw DomainError("hypercube curve needs |a_i| + |b_i| > 0 for i >= 2");
        }
        freq_[i] = freq_[i - 1] * (eta / M_PI) / span;
    }
    domain_end_ = M_PI / freq_[d - 1];
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double span = std::abs(bounds_[i].lo) + std::abs(bounds_[i].hi);
        s += span * span * freq_[i] * freq_[i];
    }
    lip_ = 0.5 * std::sqrt(s);
}

std::vector<double> HypercubeCurve::point(double theta) const {
    std::vector<double> x(bounds_.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = bounds_[i].lo, b = bounds_[i].hi;
        x[i] = 0.5 * (a - b) * std::cos(freq_[i] * theta) + 0.5 * (a + b);
    }
    return x;
}

OptimizationOutcome maximize_compact_convex(const ExtensionSpec& spec,
                                            const std::vector<Interval>& bounds, double eps) {
    std::size_t d = bounds.size();
    if (d < 2) throw DomainError("maximize_compact_convex needs dimension >= 2");
    if (!(eps > 0.0)) throw DomainError("maximize_compact_convex needs a positive precision");

    Modulus beta_bar = extended_modulus(spec);
    double diameter = 0.0;
    for (const Interval& iv : bounds) diameter += std::abs(iv.hi - iv.lo);
    double alpha = largest_step(beta_bar, eps / 2.0, std::max(diameter, 1e-30));
    double eta = spec.norm_c1 * alpha / std::sqrt(static_cast<double>(d - 1));
    HypercubeCurve curve(bounds, eta);

    // the curve is L/c1-Lipschitz in the working norm
    double lip = curve.lipschitz_l2() / spec.norm_c1;
    Modulus along = Modulus::composed(beta_bar, Modulus::linear(lip));
    Fn1d g = [&](double theta) { return extend(spec, curve.point(theta)); };

    OptimizationOutcome out =
        maximize_1d(g, along, 0.0, curve.domain_end(), StopRule::precision(eps / 2.0));
    out.upper_bound += beta_bar(alpha);
    out.best_point = spec.projector(curve.point(out.best_point[0]));
    return out;
}

std::vector<double> project_to_simplex(const std::vector<double>& x) {
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumulative = 0.0, tau = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0) tau = candidate;
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i] - tau, 0.0);
    return out;
}

}  // namespace macap
