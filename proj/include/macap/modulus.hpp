#pragma once

#include <functional>
#include <string>

#include "macap/errors.hpp"

namespace macap {

class Mac;

// Modulus of continuity: nonnegative, continuous, monotone increasing,
// eval(0) = 0. Drives every optimizer through |f(x) - f(y)| <= eval(|x - y|).
class Modulus {
public:
    double operator()(double step) const { return eval_(step); }
    const std::string& kind() const { return kind_; }

    static Modulus linear(double slope);
    // min(slope * x, cap); the arc-length bound of the simplex curve.
    static Modulus capped_linear(double slope, double cap);
    // (0.5 ln(dout - 1) + h_max) x + hbar(x / 2), nats. Requires dout >= 2.
    static Modulus mac_beta_i(std::size_t dout, double h_max);
    static Modulus composed(Modulus outer, Modulus inner);
    // eval(x) = inner(factor * x); used when rescaling the argument norm.
    static Modulus scaled(Modulus inner, double factor);
    static Modulus custom(std::string kind, std::function<double(double)> eval);

private:
    Modulus(std::string kind, std::function<double(double)> eval)
        : kind_(std::move(kind)), eval_(std::move(eval)) {}

    std::string kind_;
    std::function<double(double)> eval_;
};

// Continuity modulus of q -> I*(q) in the l1 norm.
Modulus beta_I_modulus(const Mac& mac);

}  // namespace macap
