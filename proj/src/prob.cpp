#include "macap/prob.hpp"

#include <cmath>
#include <string>

namespace macap {

double from_nats(double value_nats, LogBase base) {
    return base == LogBase::nats ? value_nats : value_nats / std::log(2.0);
}

ProbabilityVector::ProbabilityVector(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw ValidationError("probability vector must have positive dimension");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!(entries_[i] >= 0.0)) {
            throw ValidationError("probability vector entry " + std::to_string(i) +
                                  " is negative or not a number");
        }
        sum += entries_[i];
    }
    if (std::abs(sum - 1.0) > kProbTolerance) {
        throw ValidationError("probability vector sums to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
    }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t dim) {
    if (dim == 0) throw ValidationError("probability vector must have positive dimension");
    return ProbabilityVector(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t dim, std::size_t index) {
    if (index >= dim) throw ValidationError("point mass index out of range");
    std::vector<double> v(dim, 0.0);
    v[index] = 1.0;
    return ProbabilityVector(std::move(v));
}

Mac::Mac(std::size_t d1, std::size_t d2, std::size_t dout, std::vector<double> transition)
    : d1_(d1), d2_(d2), dout_(dout), transition_(std::move(transition)) {
    if (d1_ == 0 || d2_ == 0 || dout_ == 0) {
        throw ValidationError("MAC alphabet sizes must be positive");
    }
    if (transition_.size() != d1_ * d2_ * dout_) {
        throw ValidationError("MAC transition has " + std::to_string(transition_.size()) +
                              " entries, expected " + std::to_string(d1_ * d2_ * dout_));
    }
    for (double v : transition_) {
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
            throw ValidationError("MAC transition entry outside [0, 1]");
        }
    }
    for (std::size_t b1 = 0; b1 < d1_; ++b1) {
        for (std::size_t b2 = 0; b2 < d2_; ++b2) {
            double sum = 0.0;
            for (std::size_t z = 0; z < dout_; ++z) sum += at(z, b1, b2);
            if (std::abs(sum - 1.0) > kProbTolerance) {
                throw ValidationError("MAC column (b1=" + std::to_string(b1) +
                                      ", b2=" + std::to_string(b2) + ") sums to " +
                                      std::to_string(sum) + ", expected 1 within 1e-9");
            }
        }
    }
}

double Mac::column_entropy(std::size_t b1, std::size_t b2) const {
    double h = 0.0;
    for (std::size_t z = 0; z < dout_; ++z) {
        double v = at(z, b1, b2);
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

Mac Mac::swap_inputs() const {
    std::vector<double> t(transition_.size());
    for (std::size_t z = 0; z < dout_; ++z) {
        for (std::size_t b1 = 0; b1 < d1_; ++b1) {
            for (std::size_t b2 = 0; b2 < d2_; ++b2) {
                t[(z * d2_ + b2) * d1_ + b1] = at(z, b1, b2);
            }
        }
    }
    return Mac(d2_, d1_, dout_, std::move(t));
}

double entropy_nats(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

double shannon_entropy(const ProbabilityVector& p, LogBase base) {
    return from_nats(entropy_nats(p.entries()), base);
}

double modified_binary_entropy(double x) {
    if (x < 0.0 || !std::isfinite(x)) {
        throw DomainError("modified binary entropy needs x >= 0");
    }
    if (x >= 0.5) return std::log(2.0);
    if (x == 0.0) return 0.0;
    return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

EffectiveChannel effective_channel(const Mac& mac, const ProbabilityVector& q) {
    if (q.dim() != mac.d2()) {
        throw ValidationError("effective_channel: q has dimension " + std::to_string(q.dim()) +
                              ", MAC expects " + std::to_string(mac.d2()));
    }
    EffectiveChannel eff;
    eff.d1 = mac.d1();
    eff.dout = mac.dout();
    eff.aq.assign(mac.dout() * mac.d1(), 0.0);
    eff.bq.assign(mac.d1(), 0.0);
    for (std::size_t b1 = 0; b1 < mac.d1(); ++b1) {
        for (std::size_t b2 = 0; b2 < mac.d2(); ++b2) {
            double qb = q[b2];
            if (qb == 0.0) continue;
            for (std::size_t z = 0; z < mac.dout(); ++z) {
                eff.aq[z * mac.d1() + b1] += mac.at(z, b1, b2) * qb;
            }
            eff.bq[b1] += qb * mac.column_entropy(b1, b2);
        }
    }
    return eff;
}

double mutual_information(const Mac& mac, const ProbabilityVector& p, const ProbabilityVector& q,
                          LogBase base) {
    if (p.dim() != mac.d1()) {
        throw ValidationError("mutual_information: p has dimension " + std::to_string(p.dim()) +
                              ", MAC expects " + std::to_string(mac.d1()));
    }
    EffectiveChannel eff = effective_channel(mac, q);
    std::vector<double> pz(mac.dout(), 0.0);
    double cost = 0.0;
    for (std::size_t b1 = 0; b1 < mac.d1(); ++b1) {
        double pb = p[b1];
        if (pb == 0.0) continue;
        for (std::size_t z = 0; z < mac.dout(); ++z) {
            pz[z] += eff.aq_at(z, b1) * pb;
        }
        cost += pb * eff.bq[b1];
    }
    return from_nats(entropy_nats(pz) - cost, base);
}

double h_n_max(const Mac& mac) {
    double best = 0.0;
    for (std::size_t b1 = 0; b1 < mac.d1(); ++b1) {
        for (std::size_t b2 = 0; b2 < mac.d2(); ++b2) {
            best = std::max(best, mac.column_entropy(b1, b2));
        }
    }
    return best;
}

}  // namespace macap
