#include "macap/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace macap {

namespace {

std::uint64_t checked_mul_div(std::uint64_t acc, std::uint64_t num, std::uint64_t den) {
    unsigned __int128 wide = static_cast<unsigned __int128>(acc) * num;
    wide /= den;  // exact: acc already holds binomial(n, j), so den | acc * num
    if (wide > UINT64_MAX) throw std::overflow_error("binomial overflows 64 bits");
    return static_cast<std::uint64_t>(wide);
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t acc = 1;
    for (std::uint64_t j = 1; j <= k; ++j) {
        acc = checked_mul_div(acc, n - k + j, j);
    }
    return acc;
}

SimplexGrid::SimplexGrid(std::size_t d, std::size_t n) : d_(d), n_(n) {
    if (d_ < 2) throw DomainError("simplex grid needs dimension >= 2");
    if (n_ < 1) throw DomainError("simplex grid needs N >= 1");
    size_ = binomial(n_ + d_ - 1, d_ - 1);
}

// Equidistant ordering, unranked level by level. At level k the first
// coordinate equals rem - s where the block counter s ascends when the
// level runs forward and descends otherwise. Blocks connect into a
// distance-2 path only when consecutive tails meet at a shared corner,
// which forces the tail of block s to run forward exactly when s and the
// level budget have equal parity.
namespace {

bool tail_forward(std::uint64_t s, std::uint64_t rem, bool forward) {
    return (s % 2 == rem % 2) ? forward : !forward;
}

}  // namespace

SimplexGridIterator::SimplexGridIterator(const SimplexGrid& grid, std::uint64_t start_index)
    : d_(grid.dim()), n_grid_(grid.n()), size_(grid.size()), index_(start_index) {
    if (start_index > size_) throw DomainError("grid start index out of range");
    levels_.resize(d_ - 1);
    coords_.assign(d_, 0);
    if (index_ >= size_) return;

    std::uint64_t idx = start_index;
    std::uint64_t rem = n_grid_;
    bool forward = true;
    for (std::size_t k = 0; k + 1 < d_ - 1; ++k) {
        // coordinates k+1 .. d-1 share the block sum s, so block s holds
        // binomial(s + tail_dims - 1, tail_dims - 1) points
        std::uint64_t tail_dims = d_ - k - 1;
        std::uint64_t s = forward ? 0 : rem;
        std::uint64_t block = binomial(s + tail_dims - 1, tail_dims - 1);
        while (idx >= block) {
            idx -= block;
            s = forward ? s + 1 : s - 1;
            block = binomial(s + tail_dims - 1, tail_dims - 1);
        }
        levels_[k] = {rem, s, forward};
        forward = tail_forward(s, rem, forward);
        rem = s;
    }
    std::uint64_t s_last = forward ? idx : rem - idx;
    levels_[d_ - 2] = {rem, s_last, forward};
    sync_coords();
}

void SimplexGridIterator::sync_coords() {
    for (std::size_t k = 0; k < d_ - 1; ++k) {
        coords_[k] = levels_[k].rem - levels_[k].s;
    }
    coords_[d_ - 1] = levels_[d_ - 2].s;
}

void SimplexGridIterator::refill(std::size_t from_level) {
    for (std::size_t k = from_level; k < d_ - 1; ++k) {
        const Level& above = levels_[k - 1];
        bool forward = tail_forward(above.s, above.rem, above.forward);
        std::uint64_t rem = above.s;
        levels_[k] = {rem, forward ? 0 : rem, forward};
    }
}

void SimplexGridIterator::advance() {
    if (done()) return;
    ++index_;
    if (index_ >= size_) return;
    std::size_t k = d_ - 2;
    while (true) {
        Level& lv = levels_[k];
        if (lv.forward ? lv.s < lv.rem : lv.s > 0) {
            lv.s = lv.forward ? lv.s + 1 : lv.s - 1;
            break;
        }
        --k;  // index_ < size_ guarantees level 0 can still step
    }
    if (k + 1 < d_ - 1) refill(k + 1);
    sync_coords();
}

void SimplexGridIterator::write_point(std::vector<double>& out) const {
    out.resize(d_);
    double scale = 1.0 / static_cast<double>(n_grid_);
    for (std::size_t i = 0; i < d_; ++i) out[i] = static_cast<double>(coords_[i]) * scale;
}

std::vector<std::uint64_t> SimplexGrid::integer_point(std::uint64_t index) const {
    if (index >= size_) {
        throw std::out_of_range("grid index " + std::to_string(index) + " out of range, size " +
                                std::to_string(size_));
    }
    SimplexGridIterator it(*this, index);
    return it.coords();
}

ProbabilityVector SimplexGrid::point(std::uint64_t index) const {
    std::vector<std::uint64_t> n = integer_point(index);
    std::vector<double> x(d_);
    for (std::size_t i = 0; i < d_; ++i) x[i] = static_cast<double>(n[i]) / n_;
    return ProbabilityVector(std::move(x));
}

ProbabilityVector grid_point(const SimplexGrid& grid, std::uint64_t index) {
    return grid.point(index);
}

SimplexCurve::SimplexCurve(SimplexGrid grid) : grid_(grid) {
    length_ = 2.0 / static_cast<double>(grid_.n()) * static_cast<double>(grid_.size());
}

ProbabilityVector SimplexCurve::point(double theta) const {
    if (!(theta >= 0.0 && theta <= length_)) {
        throw std::out_of_range("curve parameter " + std::to_string(theta) +
                                " outside [0, " + std::to_string(length_) + "]");
    }
    double pos = theta * static_cast<double>(grid_.n()) / 2.0;
    std::uint64_t last = grid_.size() - 1;
    std::uint64_t k = std::min<std::uint64_t>(static_cast<std::uint64_t>(pos), last > 0 ? last - 1 : 0);
    // past the final grid point the curve stays there
    double t = 1.0 + static_cast<double>(k) - pos;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    std::vector<std::uint64_t> a = grid_.integer_point(k);
    std::vector<std::uint64_t> b = grid_.integer_point(std::min<std::uint64_t>(k + 1, last));
    std::vector<double> x(grid_.dim());
    double scale = 1.0 / static_cast<double>(grid_.n());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = (t * static_cast<double>(a[i]) + (1.0 - t) * static_cast<double>(b[i])) * scale;
    }
    return ProbabilityVector(std::move(x));
}

ProbabilityVector curve_point(const SimplexCurve& curve, double theta) {
    return curve.point(theta);
}

}  // namespace macap
