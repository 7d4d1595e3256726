#pragma once

#include <cstddef>
#include <vector>

#include "macap/errors.hpp"

namespace macap {

inline constexpr double kProbTolerance = 1e-9;

enum class LogBase { nats, bits };

double from_nats(double value_nats, LogBase base);

// Point of the standard simplex: entries >= 0 summing to 1 within 1e-9.
// Inputs violating this are rejected, never renormalized.
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<double> entries);

    static ProbabilityVector uniform(std::size_t dim);
    static ProbabilityVector point_mass(std::size_t dim, std::size_t index);

    std::size_t dim() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<double>& entries() const { return entries_; }

private:
    std::vector<double> entries_;
};

// Two-sender discrete memoryless MAC: transition(z, b1, b2) with each
// (b1, b2) column a distribution over z. Rows over z may be all zero.
class Mac {
public:
    Mac(std::size_t d1, std::size_t d2, std::size_t dout, std::vector<double> transition);

    std::size_t d1() const { return d1_; }
    std::size_t d2() const { return d2_; }
    std::size_t dout() const { return dout_; }

    double at(std::size_t z, std::size_t b1, std::size_t b2) const {
        return transition_[(z * d1_ + b1) * d2_ + b2];
    }
    const std::vector<double>& transition() const { return transition_; }

    // Entropy (nats) of the output column for fixed inputs.
    double column_entropy(std::size_t b1, std::size_t b2) const;

    Mac swap_inputs() const;

private:
    std::size_t d1_, d2_, dout_;
    std::vector<double> transition_;  // (z, b1, b2) row-major
};

// Channel seen by sender 1 once sender 2's distribution q is fixed:
// aq is dout x d1 left-stochastic, bq holds the averaged column entropies.
struct EffectiveChannel {
    std::size_t d1 = 0;
    std::size_t dout = 0;
    std::vector<double> aq;  // (z, b1) row-major
    std::vector<double> bq;  // length d1, nats

    double aq_at(std::size_t z, std::size_t b1) const { return aq[z * d1 + b1]; }
};

double shannon_entropy(const ProbabilityVector& p, LogBase base = LogBase::nats);

// Entropy in nats of a raw nonnegative vector, 0 log 0 = 0. No validation.
double entropy_nats(const std::vector<double>& p);

// -x ln x - (1-x) ln(1-x) for x <= 1/2, ln 2 beyond. Throws on x < 0.
double modified_binary_entropy(double x);

EffectiveChannel effective_channel(const Mac& mac, const ProbabilityVector& q);

double mutual_information(const Mac& mac, const ProbabilityVector& p,
                          const ProbabilityVector& q, LogBase base = LogBase::nats);

// Largest output-column entropy over all input pairs, in nats.
double h_n_max(const Mac& mac);

}  // namespace macap
