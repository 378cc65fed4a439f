#pragma once

#include <stdexcept>
#include <vector>

#include "partdist/assignment.hpp"
#include "partdist/labeling.hpp"
#include "partdist/rational.hpp"

namespace partdist {

// Joint cluster-mass table for a pair of partitions of a probability space
// with finitely many atoms: cell (i, j) holds P(C_i intersect D_j).
class MassMatrix {
public:
    MassMatrix(int rows, int cols, std::vector<Rational> masses)
        : rows_(rows), cols_(cols), masses_(std::move(masses)) {
        if (rows_ < 1 || cols_ < 1)
            throw std::invalid_argument("MassMatrix: dimensions must be positive");
        if (masses_.size() != static_cast<std::size_t>(rows_) * cols_)
            throw std::invalid_argument("MassMatrix: mass count does not match dimensions");
        Rational total(0);
        for (const Rational& p : masses_) {
            if (p.sign() < 0) throw std::invalid_argument("MassMatrix: negative mass");
            total += p;
        }
        if (total != Rational(1)) throw std::invalid_argument("MassMatrix: masses must sum to 1");
    }

    // Empirical plug-in table: masses n_ij / n.
    static MassMatrix plug_in(const ConfusionMatrix& m) {
        std::vector<Rational> masses;
        masses.reserve(m.cells().size());
        for (long long v : m.cells()) masses.emplace_back(v, m.total());
        return MassMatrix(m.rows(), m.cols(), std::move(masses));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Rational& at(int i, int j) const {
        return masses_[static_cast<std::size_t>(i) * cols_ + j];
    }

    // Common-denominator integer rendering: (scaled cells, denominator).
    std::pair<ConfusionMatrix, long long> scaled() const {
        long long D = 1;
        for (const Rational& p : masses_) {
            long long den = p.den();
            long long g = std::gcd(D, den);
            int128 l = int128(D / g) * den;
            if (l > 1000000000000000LL)
                throw std::overflow_error("MassMatrix: common denominator exceeds scaling guard");
            D = static_cast<long long>(l);
        }
        std::vector<long long> cells;
        cells.reserve(masses_.size());
        for (const Rational& p : masses_) cells.push_back(p.num() * (D / p.den()));
        return {ConfusionMatrix(rows_, cols_, std::move(cells)), D};
    }

private:
    int rows_, cols_;
    std::vector<Rational> masses_;
};

// Transfer distance between population partitions: half the smallest total
// symmetric-difference mass over cluster matchings, equal to one minus the
// best matched mass.  Computed exactly on the common-denominator integer
// rendering through the same assignment step as the empirical distance.
inline Rational population_dm(const MassMatrix& m) {
    auto [cells, denom] = m.scaled();
    return med(cells).value;
}

// Hamming distance between the partitions' product-measure kernels.
inline Rational population_dh(const MassMatrix& m) {
    auto [cells, denom] = m.scaled();
    int128 acc = 0;
    for (int i = 0; i < cells.rows(); ++i) acc += int128(cells.row_margin(i)) * cells.row_margin(i);
    for (int j = 0; j < cells.cols(); ++j) acc += int128(cells.col_margin(j)) * cells.col_margin(j);
    for (long long v : cells.cells()) acc -= 2 * int128(v) * v;
    return Rational::from_int128(acc, int128(denom) * denom);
}

}  // namespace partdist
