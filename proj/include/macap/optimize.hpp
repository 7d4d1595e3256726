#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "macap/grid.hpp"
#include "macap/modulus.hpp"

namespace macap {

struct OptimizationOutcome {
    double best_value = 0.0;
    std::vector<double> best_point;
    double upper_bound = 0.0;  // certified: global max <= upper_bound
    std::uint64_t iterations = 0;
    bool converged = false;
};

// Precision target, iteration cap, or both. At least one must be set.
struct StopRule {
    std::optional<double> epsilon;
    std::optional<std::uint64_t> max_iterations;

    static StopRule precision(double eps) { return {eps, std::nullopt}; }
    static StopRule iterations(std::uint64_t k) { return {std::nullopt, k}; }
};

// Largest step with beta(step) <= target, by bisection; when beta stays
// below target on [0, diameter], the diameter itself.
double largest_step(const Modulus& beta, double target, double diameter);

using Fn1d = std::function<double(double)>;
using FnVec = std::function<double(const std::vector<double>&)>;

// Node set of the sawtooth maximizer, exposed to observers per iteration.
struct SawtoothNode {
    double q;
    double f;
};

struct Maximize1dOptions {
    // Called after each iterate joins, with the sorted node set.
    std::function<void(const std::vector<SawtoothNode>&)> observer;
};

// Piyavskii-Shubert for beta-Lipschitz-like f on [a, b]. Upper bounds come
// from the cone functions F_i(q) = f(q_i) + beta(|q - q_i|); the next iterate
// is the crossing of adjacent cones with the largest bound, leftmost on ties.
OptimizationOutcome maximize_1d(const Fn1d& f, const Modulus& beta, double a, double b,
                                const StopRule& stop, const Maximize1dOptions& opts = {});

// Exhaustive scan of the simplex grid with N = ceil(1/delta^2),
// beta(delta) <= eps/2. Evaluations fan out across threads; the reduction
// keeps the lowest index among equal maxima, so the result is
// schedule-independent.
OptimizationOutcome maximize_grid(const FnVec& f, const Modulus& beta, std::size_t d,
                                  double eps, unsigned threads = 1);

// Same contract via the dense curve: reduces to maximize_1d on f composed
// with the curve, modulus beta(min(x, 2)).
OptimizationOutcome maximize_dense_curve(const FnVec& f, const Modulus& beta, std::size_t d,
                                         double eps, const StopRule& stop_1d = {});

// Lipschitz-like extension f|D -> R^d: f(proj(x)) - beta(dist(x, proj(x))).
struct ExtensionSpec {
    FnVec f;
    Modulus beta = Modulus::linear(1.0);
    Modulus kappa = Modulus::linear(1.0);  // modulus of beta itself
    std::function<std::vector<double>(const std::vector<double>&)> projector;
    // c1 ||.|| <= ||.||2 <= c2 ||.||; defaults match the l1 norm on R^d.
    double norm_c1 = 1.0;
    double norm_c2 = 1.0;
    std::function<double(const std::vector<double>&)> norm;  // default l1
};

double extend(const ExtensionSpec& spec, const std::vector<double>& x);

// Extension's modulus: beta(C x) + kappa((C + 1) x) with C = c2/c1.
Modulus extended_modulus(const ExtensionSpec& spec);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Cosine space-filling curve for a box, dense within sqrt(d-1) * eta in l2.
class HypercubeCurve {
public:
    HypercubeCurve(std::vector<Interval> bounds, double eta);

    double domain_end() const { return domain_end_; }  // theta in [0, end]
    double lipschitz_l2() const { return lip_; }
    std::vector<double> point(double theta) const;

private:
    std::vector<Interval> bounds_;
    std::vector<double> freq_;
    double domain_end_, lip_;
};

// Maximize f over a compact convex D inside the given box, by extending f
// beyond D and running the sawtooth maximizer along a hypercube curve.
OptimizationOutcome maximize_compact_convex(const ExtensionSpec& spec,
                                            const std::vector<Interval>& bounds, double eps);

// Euclidean projection onto the standard simplex.
std::vector<double> project_to_simplex(const std::vector<double>& x);

double l1_norm(const std::vector<double>& x);
double l1_distance(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace macap
