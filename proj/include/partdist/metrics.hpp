#pragma once

#include <stdexcept>

#include "partdist/labeling.hpp"
#include "partdist/rational.hpp"

namespace partdist {

// Object-pair agreement tallies between two partitions:
//   a  pairs joined in both,
//   b  pairs joined in the second only,
//   c  pairs joined in the first only,
//   d  pairs split in both.
struct PairCounts {
    long long a = 0, b = 0, c = 0, d = 0;
    long long n = 0;

    long long pair_total() const { return choose2(n); }
};

// Margins and the a-tally read straight off the cell grid; b and c follow by
// subtraction from the margin pair totals.
inline PairCounts pair_counts_raw(int rows, int cols, const long long* cells) {
    PairCounts pc;
    long long a = 0, row_pairs = 0, col_pairs = 0;
    for (int j = 0; j < cols; ++j) {
        long long m = 0;
        for (int i = 0; i < rows; ++i) m += cells[static_cast<std::size_t>(i) * cols + j];
        col_pairs += choose2(m);
    }
    for (int i = 0; i < rows; ++i) {
        long long m = 0;
        for (int j = 0; j < cols; ++j) {
            long long v = cells[static_cast<std::size_t>(i) * cols + j];
            m += v;
            a += choose2(v);
        }
        pc.n += m;
        row_pairs += choose2(m);
    }
    pc.a = a;
    pc.b = col_pairs - a;
    pc.c = row_pairs - a;
    pc.d = choose2(pc.n) - pc.a - pc.b - pc.c;
    return pc;
}

inline PairCounts pair_counts(const ConfusionMatrix& m) {
    return pair_counts_raw(m.rows(), m.cols(), m.cells().data());
}

inline Rational rand_distance(const PairCounts& pc) {
    if (pc.n < 2) throw std::domain_error("rand_distance: needs at least two objects");
    return Rational(pc.b + pc.c, pc.pair_total());
}

inline Rational rand_distance(const ConfusionMatrix& m) { return rand_distance(pair_counts(m)); }

inline Rational rand_index(const PairCounts& pc) { return Rational(1) - rand_distance(pc); }
inline Rational rand_index(const ConfusionMatrix& m) { return rand_index(pair_counts(m)); }

// Permutation-model expectation of the Rand distance given the margins.
inline Rational expected_rd(const PairCounts& pc) {
    if (pc.n < 2) throw std::domain_error("expected_rd: needs at least two objects");
    int128 num = int128(pc.a + pc.b) * (pc.b + pc.d) + int128(pc.a + pc.c) * (pc.c + pc.d);
    int128 den = int128(pc.pair_total()) * pc.pair_total();
    return Rational::from_int128(num, den);
}

inline Rational expected_rd(const ConfusionMatrix& m) { return expected_rd(pair_counts(m)); }

// Rand distance rescaled so that independent partitions score 1 on average.
// Undefined when the expectation vanishes (degenerate margins).
inline Rational adjusted_rand_distance(const PairCounts& pc) {
    int128 den = int128(pc.a + pc.b) * (pc.b + pc.d) + int128(pc.a + pc.c) * (pc.c + pc.d);
    if (den == 0)
        throw std::domain_error("adjusted_rand_distance: zero expected Rand distance");
    int128 num = int128(pc.pair_total()) * (pc.b + pc.c);
    return Rational::from_int128(num, den);
}

inline Rational adjusted_rand_distance(const ConfusionMatrix& m) {
    return adjusted_rand_distance(pair_counts(m));
}

inline Rational adjusted_rand_index(const PairCounts& pc) {
    return Rational(1) - adjusted_rand_distance(pc);
}
inline Rational adjusted_rand_index(const ConfusionMatrix& m) {
    return adjusted_rand_index(pair_counts(m));
}

// Plug-in Hamming distance between the partitions' set-indicator kernels.
// Identity: rand_distance == hamming_empirical * n/(n-1), exactly.
inline Rational hamming_empirical(const ConfusionMatrix& m) {
    int128 acc = 0;
    for (int i = 0; i < m.rows(); ++i) acc += int128(m.row_margin(i)) * m.row_margin(i);
    for (int j = 0; j < m.cols(); ++j) acc += int128(m.col_margin(j)) * m.col_margin(j);
    for (long long v : m.cells()) acc -= 2 * int128(v) * v;
    return Rational::from_int128(acc, int128(m.total()) * m.total());
}

}  // namespace partdist
