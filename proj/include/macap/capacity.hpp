#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macap/optimize.hpp"
#include "macap/prob.hpp"

namespace macap {

struct InnerSolveReport {
    double value = 0.0;                      // I*(q) up to gap, nats
    std::vector<double> optimizer_p;
    double gap = 0.0;                        // value + gap bounds max_p I(p, q)
    std::uint64_t iterations = 0;
};

struct InnerSolveOptions {
    std::uint64_t max_iterations = 10'000'000;
    std::vector<double> warm_start;          // strictly positive if given
    std::vector<double>* gap_trace = nullptr;
};

// Multiplicative fixed-point iteration for max_p H(A p) - <b, p>. The
// reported gap min_t max_j D_j(p_t) - best value certifies suboptimality
// and is nonincreasing by construction.
InnerSolveReport solve_concave_channel(const std::vector<double>& a, std::size_t dout,
                                       std::size_t din, const std::vector<double>& b,
                                       double eps, const InnerSolveOptions& opts = {});

InnerSolveReport inner_capacity(const Mac& mac, const ProbabilityVector& q, double eps_inner,
                                const InnerSolveOptions& opts = {});

enum class SumCapacityMethod { piyavskii_shubert_d2, grid, dense_curve };

std::string to_string(SumCapacityMethod method);

struct SumCapacityReport {
    double value = 0.0;        // nats
    SumCapacityMethod method = SumCapacityMethod::piyavskii_shubert_d2;
    double precision = 0.0;    // requested eps
    double upper_bound = 0.0;  // certified
    std::vector<double> outer_point;  // q estimate
    std::vector<double> inner_point;  // p estimate
    std::uint64_t iterations = 0;
    bool converged = false;
};

struct SumCapacityOptions {
    std::optional<std::uint64_t> max_iterations;  // bounded mode for the d2 = 2 path
    double eval_ceiling = 1e7;                    // refusal guard for grid / dense curve
    unsigned threads = 1;
    std::uint64_t inner_max_iterations = 10'000'000;
};

// One-dimensional sawtooth search over q = (s, 1-s); the other input's
// alphabet must have size 2 (inputs are swapped when it is the first).
SumCapacityReport sum_capacity_d2_binary(const Mac& mac, const StopRule& stop,
                                         const SumCapacityOptions& opts = {});

SumCapacityReport sum_capacity_general(const Mac& mac, SumCapacityMethod method, double eps,
                                       const SumCapacityOptions& opts = {});

// Capacity of the MAC as a point-to-point channel over joint inputs; the
// convex relaxation that upper-bounds the sum capacity.
double relaxed_sum_capacity(const Mac& mac, double eps, const InnerSolveOptions& opts = {});
InnerSolveReport relaxed_sum_capacity_report(const Mac& mac, double eps,
                                             const InnerSolveOptions& opts = {});

}  // namespace macap
