#include "macap/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "macap/prob.hpp"

namespace macap {

Modulus Modulus::linear(double slope) {
    if (!(slope >= 0.0)) throw DomainError("linear modulus needs slope >= 0");
    return Modulus("linear", [slope](double x) { return slope * x; });
}

Modulus Modulus::capped_linear(double slope, double cap) {
    if (!(slope >= 0.0) || !(cap >= 0.0)) {
        throw DomainError("capped linear modulus needs slope, cap >= 0");
    }
    return Modulus("capped_linear",
                   [slope, cap](double x) { return std::min(slope * x, cap); });
}

Modulus Modulus::mac_beta_i(std::size_t dout, double h_max) {
    if (dout < 2) throw DomainError("beta_I needs an output alphabet of size >= 2");
    double slope = 0.5 * std::log(static_cast<double>(dout - 1)) + h_max;
    return Modulus("mac_beta_I", [slope](double x) {
        return slope * x + modified_binary_entropy(0.5 * x);
    });
}

Modulus Modulus::composed(Modulus outer, Modulus inner) {
    auto o = outer.eval_;
    auto i = inner.eval_;
    return Modulus("composed(" + outer.kind_ + "," + inner.kind_ + ")",
                   [o, i](double x) { return o(i(x)); });
}

Modulus Modulus::scaled(Modulus inner, double factor) {
    if (!(factor >= 0.0)) throw DomainError("scaled modulus needs factor >= 0");
    auto i = inner.eval_;
    return Modulus("scaled(" + inner.kind_ + ")", [i, factor](double x) { return i(factor * x); });
}

Modulus Modulus::custom(std::string kind, std::function<double(double)> eval) {
    return Modulus(std::move(kind), std::move(eval));
}

Modulus beta_I_modulus(const Mac& mac) {
    return Modulus::mac_beta_i(mac.dout(), h_n_max(mac));
}

}  // namespace macap
