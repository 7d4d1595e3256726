#pragma once

#include <cstdint>
#include <vector>

#include "macap/errors.hpp"
#include "macap/prob.hpp"

namespace macap {

// binomial(n, k) in exact integer arithmetic; throws std::overflow_error
// when the result does not fit in 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Rational grid {n/N : n in N^d, sum n = N} with the equidistant ordering:
// consecutive points are exactly 2/N apart in l1. Points are unranked on
// demand, the grid is never materialized.
class SimplexGrid {
public:
    SimplexGrid(std::size_t d, std::size_t n);

    std::size_t dim() const { return d_; }
    std::size_t n() const { return n_; }
    std::uint64_t size() const { return size_; }

    ProbabilityVector point(std::uint64_t index) const;
    // Integer coordinates of the index-th point (times n).
    std::vector<std::uint64_t> integer_point(std::uint64_t index) const;

private:
    std::size_t d_, n_;
    std::uint64_t size_;
};

ProbabilityVector grid_point(const SimplexGrid& grid, std::uint64_t index);

// Walks the equidistant ordering in O(d) per step. Starting mid-grid costs
// one unranking, so parallel scans can start each worker at its chunk.
class SimplexGridIterator {
public:
    SimplexGridIterator(const SimplexGrid& grid, std::uint64_t start_index);

    const std::vector<std::uint64_t>& coords() const { return coords_; }
    std::uint64_t index() const { return index_; }
    bool done() const { return index_ >= size_; }
    void advance();

    // Current point scaled by 1/N into out (size d).
    void write_point(std::vector<double>& out) const;

private:
    struct Level {
        std::uint64_t rem;  // budget shared by this and deeper coordinates
        std::uint64_t s;    // part passed to deeper coordinates
        bool forward;       // direction this level's block counter moves
    };

    void refill(std::size_t from_level);
    void sync_coords();

    std::size_t d_;
    std::uint64_t n_grid_, size_, index_;
    std::vector<Level> levels_;             // levels 0 .. d-2
    std::vector<std::uint64_t> coords_;
};

// Piecewise-linear curve through the ordered grid; consecutive grid points
// are 2/N apart, so arc length parameterizes it with Lipschitz bound
// min(|dtheta|, 2) in l1. Dense within 2(d-1)/N of every simplex point.
class SimplexCurve {
public:
    explicit SimplexCurve(SimplexGrid grid);

    const SimplexGrid& grid() const { return grid_; }
    double length() const { return length_; }

    ProbabilityVector point(double theta) const;

private:
    SimplexGrid grid_;
    double length_;
};

ProbabilityVector curve_point(const SimplexCurve& curve, double theta);

}  // namespace macap
