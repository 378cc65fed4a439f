#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "partdist/assignment.hpp"
#include "partdist/combinatorics.hpp"
#include "partdist/labeling.hpp"
#include "partdist/metrics.hpp"
#include "partdist/rational.hpp"

namespace partdist {

// Largest achievable MED over confusion matrices with the given shape:
// 1 - ceil(n/q)/n where q = max(r, s).
inline Rational max_med(int r, int s, long long n) {
    long long q = std::max(r, s);
    if (q < 2) throw std::domain_error("max_med: needs at least two clusters on one side");
    if (q > n) throw std::domain_error("max_med: more clusters than objects");
    long long ceil_nq = (n + q - 1) / q;
    return Rational(n - ceil_nq, n);
}

// MED rescaled by its maximum for the matrix's own shape.
inline Rational nmed(const ConfusionMatrix& m) {
    return med(m).value / max_med(m.rows(), m.cols(), m.total());
}

// Largest achievable Rand distance over the family, in closed form; requires
// n >= 2(r-1)+s after orienting r <= s.
inline Rational max_rd(int r, int s, long long n) {
    if (r > s) std::swap(r, s);
    if (r < 2) throw std::domain_error("max_rd: needs at least two clusters per side");
    if (n < 2LL * (r - 1) + s)
        throw std::domain_error("max_rd: defined for n >= 2(r-1)+s");
    const long long k = (n - 2 * (r - 1)) / s;
    const long long l = n - 2 * (r - 1) - k * s;
    const int128 scaled = int128(n - r + 1) * (n - r + 1) + int128(r - 1) * (2 * r - 3) -
                          int128(s) * k * k - int128(l) * (2 * k + 1);
    return Rational::from_int128(scaled, int128(n) * (n - 1));
}

// Canonical maximizer of the Rand distance: heavy first row
// (k+r-1, then l copies of k+1, then k's), unit first column below.
inline ConfusionMatrix argmax_rd_witness(int r, int s, long long n) {
    if (r < 2 || r > s) throw std::invalid_argument("argmax_rd_witness: requires 2 <= r <= s");
    if (n < 2LL * (r - 1) + s)
        throw std::domain_error("argmax_rd_witness: defined for n >= 2(r-1)+s");
    const long long k = (n - 2 * (r - 1)) / s;
    const long long l = n - 2 * (r - 1) - k * s;
    std::vector<long long> cells(static_cast<std::size_t>(r) * s, 0);
    cells[0] = k + r - 1;
    for (int j = 1; j < s; ++j) cells[j] = (j <= l) ? k + 1 : k;
    for (int i = 1; i < r; ++i) cells[static_cast<std::size_t>(i) * s] = 1;
    return ConfusionMatrix(r, s, std::move(cells));
}

// Rand distance rescaled by its maximum for the matrix's own shape.
inline Rational nrd(const ConfusionMatrix& m) {
    return rand_distance(m) / max_rd(m.rows(), m.cols(), m.total());
}

// Rand distance of the all-equal table (perfectly unrelated labels); exists
// only when rs divides n.
inline Rational independent_rd(int r, int s, long long n) {
    if (n % (static_cast<long long>(r) * s) != 0)
        throw std::invalid_argument("independent_rd: n must be a multiple of r*s");
    if (n < 2) throw std::domain_error("independent_rd: needs at least two objects");
    return Rational::from_int128(int128(n) * (r + s - 2), int128(n - 1) * r * s);
}

// Adjusted Rand distance of the all-equal table.
inline Rational independent_ard(int r, int s, long long n) {
    if (n % (static_cast<long long>(r) * s) != 0)
        throw std::invalid_argument("independent_ard: n must be a multiple of r*s");
    if (r + s < 3 || n < 2) throw std::domain_error("independent_ard: degenerate shape");
    const int128 num = int128(n - 1) * (r + s - 2);
    const int128 den = int128(n) * (r + s - 2) - (2LL * r * s - r - s);
    return Rational::from_int128(num, den);
}

// One row of the two-cluster landscape: everything a 2x2 table can do at a
// fixed diagonal count d1.  MED and RD depend on d1 alone; the ARD spreads
// over an enumerable set of values.
struct TwoByTwoRow {
    long long d1 = 0;
    Rational med_value;
    Rational rd_value;
    std::vector<Rational> ard_values;          // sorted, distinct
    unsigned long long ard_undefined = 0;      // slice members with zero expected RD
};

inline std::vector<TwoByTwoRow> two_by_two_profile(long long n) {
    if (n < 2) throw std::invalid_argument("two_by_two_profile: n must be at least 2");
    std::vector<TwoByTwoRow> rows;
    rows.reserve(static_cast<std::size_t>(n) + 1);
    for (long long d1 = 0; d1 <= n; ++d1) {
        const long long d2 = n - d1;
        TwoByTwoRow row;
        row.d1 = d1;
        row.med_value = Rational(std::min(d1, d2), n);
        row.rd_value = Rational::from_int128(int128(d1) * d2, int128(choose2(n)));
        std::vector<Rational> seen;
        for (long long n11 = 0; n11 <= d1; ++n11) {
            for (long long n12 = 0; n12 <= d2; ++n12) {
                const long long n22 = d1 - n11, n21 = d2 - n12;
                if (n11 + n12 < 1 || n21 + n22 < 1 || n11 + n21 < 1 || n12 + n22 < 1)
                    continue;
                const long long cells[4] = {n11, n12, n21, n22};
                PairCounts pc = pair_counts_raw(2, 2, cells);
                try {
                    seen.push_back(adjusted_rand_distance(pc));
                } catch (const std::domain_error&) {
                    ++row.ard_undefined;
                }
            }
        }
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        row.ard_values = std::move(seen);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ARD of the even-split witness [[d1, d2/2], [d2/2, 0]] for d1 >= d2 >= 2.
// For even d2 this equals the largest ARD among tables with diagonal count
// d1 (checked exhaustively for n <= 60; n = 4 is the lone exception).
inline Rational alpha_n(long long n, long long d1) {
    const long long d2 = n - d1;
    if (d2 < 2) throw std::domain_error("alpha_n: requires d2 >= 2 (d2 = 1 has its own witness)");
    if (d1 < d2) throw std::domain_error("alpha_n: requires d1 >= d2");
    const int128 num = int128(4) * n * (n - 1) * d1;
    const int128 den = int128(d1 + n) * (int128(d1) * d1 + int128(n) * (n - 2));
    return Rational::from_int128(num, den);
}

// Global 2x2 ARD maximum, computed exactly in O(n^2).  Expected RD depends
// only on the two margin splits while RD = d1*d2/C(n,2), so per margin pair
// the best table moves the diagonal count as close to n/2 as achievable.
// Arrowhead witnesses undershoot at n = 4 and n = 6, where balanced tables
// win, hence the direct scan.  Margins run downward so ties settle on the
// heaviest splits.
struct TwoByTwoArdMax {
    Rational value;
    long long d1 = 0;
    ConfusionMatrix witness{2, 2, {1, 0, 0, 1}};
};

inline TwoByTwoArdMax two_by_two_ard_max(long long n) {
    if (n < 3) throw std::domain_error("two_by_two_ard_max: needs n >= 3");
    const long long total = choose2(n);
    std::optional<TwoByTwoArdMax> best;
    for (long long r1 = n - 1; r1 >= 1; --r1) {
        const long long sum_r = choose2(r1) + choose2(n - r1);
        for (long long c1 = n - 1; c1 >= 1; --c1) {
            const long long sum_c = choose2(c1) + choose2(n - c1);
            const int128 erd_num =
                int128(total) * (sum_r + sum_c) - int128(2) * sum_r * sum_c;
            if (erd_num == 0) continue;
            // diagonal counts reachable under these margins form a step-2
            // ladder; pick the rung nearest n/2, preferring the larger side
            const long long lo = (r1 + c1 <= n) ? n - r1 - c1 : r1 + c1 - n;
            const long long hi = n - ((r1 >= c1) ? r1 - c1 : c1 - r1);
            long long d1 = n / 2;
            if ((d1 & 1) != (lo & 1)) ++d1;
            if (d1 < lo) d1 = lo;
            if (d1 > hi) d1 = hi;
            const Rational ard =
                Rational::from_int128(int128(total) * d1 * (n - d1), erd_num);
            if (!best || best->value < ard) {
                const long long n11 = (d1 - n + r1 + c1) / 2;
                best = TwoByTwoArdMax{
                    ard, d1,
                    ConfusionMatrix(2, 2, {n11, r1 - n11, c1 - n11, d1 - n11})};
            }
        }
    }
    if (!best) throw std::domain_error("two_by_two_ard_max: no matrix with a defined value");
    return *best;
}

// First-order RD approximation near identical partitions: 2(n12+n21)/(n-1).
inline Rational taylor_rd_small(long long n, long long n12, long long n21) {
    if (n < 2) throw std::invalid_argument("taylor_rd_small: n must be at least 2");
    if (n12 < 0 || n21 < 0 || n12 + n21 > n)
        throw std::invalid_argument("taylor_rd_small: off-diagonal mass out of range");
    return Rational(2 * (n12 + n21), n - 1);
}

// Shape tests for conjectured maximizers. ------------------------------------

// Heavy first row, unit first column below, first row nonincreasing.
inline bool is_rd_witness_shape(int r, int s, const long long* cells) {
    for (int j = 1; j < s; ++j)
        if (cells[j] > cells[j - 1]) return false;
    for (int i = 1; i < r; ++i) {
        if (cells[static_cast<std::size_t>(i) * s] != 1) return false;
        for (int j = 1; j < s; ++j)
            if (cells[static_cast<std::size_t>(i) * s + j] != 0) return false;
    }
    return true;
}

// Arrowhead: mass only in the first row and first column, both nonincreasing
// after the corner, corner dominating; equal arms when the table is square.
inline bool is_ard_arrowhead_shape(int r, int s, const long long* cells) {
    for (int i = 1; i < r; ++i)
        for (int j = 1; j < s; ++j)
            if (cells[static_cast<std::size_t>(i) * s + j] != 0) return false;
    for (int j = 2; j < s; ++j)
        if (cells[j] > cells[j - 1]) return false;
    for (int i = 2; i < r; ++i)
        if (cells[static_cast<std::size_t>(i) * s] > cells[static_cast<std::size_t>(i - 1) * s])
            return false;
    if (s > 1 && cells[1] > cells[0]) return false;
    if (r > 1 && cells[static_cast<std::size_t>(1) * s] > cells[0]) return false;
    if (r == s) {
        for (int i = 1; i < r; ++i)
            if (cells[static_cast<std::size_t>(i) * s] != cells[i]) return false;
    }
    return true;
}

// Exhaustive confirmation of the two maximizer conjectures on one family.
struct ConjectureReport {
    int r = 0, s = 0;
    long long n = 0;
    unsigned long long family_size = 0;

    Rational rd_max;
    Rational rd_formula;
    bool rd_matches_formula = false;
    bool rd_witness_attains = false;   // closed-form witness reaches the max
    bool rd_shape_attained = false;    // some argmax has the witness shape
    std::optional<ConfusionMatrix> rd_argmax;  // lexicographically first

    Rational ard_max;
    bool ard_shape_attained = false;   // some argmax is an arrowhead
    std::optional<ConfusionMatrix> ard_argmax;
    unsigned long long ard_undefined = 0;

    std::vector<std::string> counterexamples;

    bool ok() const { return counterexamples.empty(); }
};

inline ConjectureReport verify_maximizer_conjectures(
    int r, int s, long long n, unsigned long long guard = default_enumeration_guard) {
    if (r < 2 || r > s) throw std::invalid_argument("verify_maximizer_conjectures: requires 2 <= r <= s");
    if (n < 2LL * (r - 1) + s)
        throw std::domain_error("verify_maximizer_conjectures: requires n >= 2(r-1)+s");

    ConjectureReport rep;
    rep.r = r;
    rep.s = s;
    rep.n = n;
    rep.rd_formula = max_rd(r, s, n);

    const Rational pair_total(choose2(n));
    long long best_bc = -1;
    int128 best_ard_num = 0, best_ard_den = 1;
    std::vector<long long> rd_arg, ard_arg;

    rep.family_size = enumerate_confusion_matrices(
        r, s, n,
        [&](const long long* cells) {
            PairCounts pc = pair_counts_raw(r, s, cells);
            const long long bc = pc.b + pc.c;
            if (bc > best_bc) {
                best_bc = bc;
                rd_arg.assign(cells, cells + static_cast<std::size_t>(r) * s);
                rep.rd_shape_attained = is_rd_witness_shape(r, s, cells);
            } else if (bc == best_bc && !rep.rd_shape_attained) {
                rep.rd_shape_attained = is_rd_witness_shape(r, s, cells);
            }
            const int128 den = int128(pc.a + pc.b) * (pc.b + pc.d) + int128(pc.a + pc.c) * (pc.c + pc.d);
            if (den == 0) {
                ++rep.ard_undefined;
                return;
            }
            const int128 num = int128(choose2(n)) * bc;
            const int128 lhs = num * best_ard_den;
            const int128 rhs = best_ard_num * den;
            if (lhs > rhs) {
                best_ard_num = num;
                best_ard_den = den;
                ard_arg.assign(cells, cells + static_cast<std::size_t>(r) * s);
                rep.ard_shape_attained = is_ard_arrowhead_shape(r, s, cells);
            } else if (lhs == rhs && !rep.ard_shape_attained) {
                rep.ard_shape_attained = is_ard_arrowhead_shape(r, s, cells);
            }
        },
        guard);

    rep.rd_max = Rational(best_bc, choose2(n));
    rep.ard_max = Rational::from_int128(best_ard_num, best_ard_den);
    rep.rd_argmax = ConfusionMatrix(r, s, rd_arg);
    rep.ard_argmax = ConfusionMatrix(r, s, ard_arg);
    rep.rd_matches_formula = rep.rd_max == rep.rd_formula;
    rep.rd_witness_attains = rand_distance(argmax_rd_witness(r, s, n)) == rep.rd_max;

    if (!rep.rd_matches_formula)
        rep.counterexamples.push_back("RD max " + rep.rd_max.to_string() + " != closed form " +
                                      rep.rd_formula.to_string() + " at " +
                                      rep.rd_argmax->to_string());
    if (!rep.rd_witness_attains)
        rep.counterexamples.push_back("closed-form witness does not attain RD max " +
                                      rep.rd_max.to_string());
    if (!rep.rd_shape_attained)
        rep.counterexamples.push_back("no RD argmax has the heavy-row/unit-column shape; first argmax " +
                                      rep.rd_argmax->to_string());
    if (!rep.ard_shape_attained)
        rep.counterexamples.push_back("no ARD argmax is an arrowhead; first argmax " +
                                      rep.ard_argmax->to_string());
    return rep;
}

}  // namespace partdist
