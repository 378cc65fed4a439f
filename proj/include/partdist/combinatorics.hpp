#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "partdist/assignment.hpp"
#include "partdist/bigint.hpp"
#include "partdist/labeling.hpp"
#include "partdist/rational.hpp"
#include "partdist/rng.hpp"

namespace partdist {

inline constexpr unsigned long long default_enumeration_guard = 10000000ULL;

// Thrown when an exhaustive walk would exceed the configured guard.
struct EnumerationGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weak compositions of n into k ordered nonnegative parts: C(n+k-1, n).
inline BigUint count_compositions(long long n, long long k) {
    if (n < 0 || k < 0) throw std::invalid_argument("count_compositions: negative argument");
    if (k == 0) return BigUint(n == 0 ? 1 : 0);
    return BigUint::binomial(static_cast<unsigned long long>(n + k - 1),
                             static_cast<unsigned long long>(n));
}

// Exact size of the family of r x s tables with total n and positive margins,
// by inclusion-exclusion over forced-zero row and column sets.
inline BigUint count_confusion_matrices(int r, int s, long long n) {
    if (r < 1 || s < 1 || n < 1)
        throw std::invalid_argument("count_confusion_matrices: dimensions and total must be positive");
    BigUint plus(0), minus(0);
    for (int i = 0; i <= r; ++i) {
        for (int j = 0; j <= s; ++j) {
            long long k = static_cast<long long>(r - i) * (s - j);
            BigUint term = count_compositions(n, k);
            if (term.is_zero()) continue;
            term.mul_u64(BigUint::binomial(r, i).to_u64());
            term.mul_u64(BigUint::binomial(s, j).to_u64());
            if ((i + j) % 2 == 0)
                plus += term;
            else
                minus += term;
        }
    }
    return plus - minus;
}

// Exhaustive walk over the r x s tables with total n and positive margins, in
// row-major lexicographic order over the cell sequence.  The walk can be
// restricted to a fixed first row, which partitions the full stream into
// disjoint, independently runnable slices.
class MatrixEnumerator {
public:
    MatrixEnumerator(int r, int s, long long n) : r_(r), s_(s), n_(n) {
        if (r_ < 1 || s_ < 1 || n_ < 1)
            throw std::invalid_argument("MatrixEnumerator: dimensions and total must be positive");
    }

    int rows() const { return r_; }
    int cols() const { return s_; }
    long long total() const { return n_; }

    // visit(const long long* cells) for every member, row-major lex order.
    template <typename Visitor>
    void for_each(Visitor&& visit) const {
        State st(r_, s_);
        walk(st, 0, n_, visit);
    }

    // Feasible first rows in lexicographic order.
    std::vector<std::vector<long long>> first_rows() const {
        std::vector<std::vector<long long>> rows;
        std::vector<long long> row(s_, 0);
        first_rows_rec(row, 0, n_, rows);
        return rows;
    }

    // The slice of the stream whose first row equals the given one.
    template <typename Visitor>
    void for_each_with_first_row(const std::vector<long long>& row, Visitor&& visit) const {
        if (static_cast<int>(row.size()) != s_)
            throw std::invalid_argument("for_each_with_first_row: row width mismatch");
        State st(r_, s_);
        long long used = 0;
        for (int j = 0; j < s_; ++j) {
            st.cells[j] = row[j];
            st.col_sums[j] = row[j];
            if (row[j] > 0) --st.zero_cols;
            used += row[j];
        }
        if (used > n_ || (r_ == 1 && used != n_)) return;
        if (r_ == 1) {
            if (st.zero_cols == 0 && used >= 1) visit(st.cells.data());
            return;
        }
        if (used < 1) return;
        walk(st, s_, n_ - used, visit);
    }

private:
    struct State {
        State(int r, int s) : cells(static_cast<std::size_t>(r) * s, 0), col_sums(s, 0), zero_cols(s) {}
        std::vector<long long> cells;
        std::vector<long long> col_sums;
        int zero_cols;
    };

    // idx walks cells row-major; rem is the mass still unplaced.
    template <typename Visitor>
    void walk(State& st, int idx, long long rem, Visitor& visit) const {
        const int i = idx / s_, j = idx % s_;
        const bool last_cell = idx == r_ * s_ - 1;
        const bool row_end = j == s_ - 1;
        const long long row_before = row_sum(st, i, j);

        if (last_cell) {
            // forced value: whatever mass remains
            const long long v = rem;
            if (row_before + v < 1) return;
            if (st.col_sums[j] + v < 1) return;
            if (st.zero_cols - (st.col_sums[j] == 0 && v > 0 ? 1 : 0) > 0) return;
            st.cells[idx] = v;
            visit(st.cells.data());
            st.cells[idx] = 0;
            return;
        }

        const int rows_below = r_ - 1 - i;
        for (long long v = 0; v <= rem; ++v) {
            const long long rem2 = rem - v;
            const bool col_was_zero = st.col_sums[j] == 0;
            const int zero_cols2 = st.zero_cols - (col_was_zero && v > 0 ? 1 : 0);

            if (row_end && row_before + v < 1) continue;
            if (i == r_ - 1) {
                // on the last row every still-zero column at or before j is dead
                if (zero_cols2 > zero_cols_after(st, j)) continue;
            }
            int rows_needing = rows_below + (!row_end && row_before + v < 1 ? 1 : 0);
            if (rem2 < std::max(static_cast<long long>(rows_needing),
                                static_cast<long long>(zero_cols2)))
                continue;

            st.cells[idx] = v;
            st.col_sums[j] += v;
            st.zero_cols = zero_cols2;
            walk(st, idx + 1, rem2, visit);
            st.zero_cols += (col_was_zero && v > 0 ? 1 : 0);
            st.col_sums[j] -= v;
            st.cells[idx] = 0;
        }
    }

    long long row_sum(const State& st, int i, int j_upto) const {
        long long t = 0;
        const std::size_t base = static_cast<std::size_t>(i) * s_;
        for (int j = 0; j < j_upto; ++j) t += st.cells[base + j];
        return t;
    }

    // zero columns strictly after j; on the last row these are the only ones
    // that can still be filled
    int zero_cols_after(const State& st, int j) const {
        int z = 0;
        for (int c = j + 1; c < s_; ++c)
            if (st.col_sums[c] == 0) ++z;
        return z;
    }

    void first_rows_rec(std::vector<long long>& row, int j, long long rem,
                        std::vector<std::vector<long long>>& out) const {
        if (j == s_) {
            long long used = n_ - rem;
            if (used < 1) return;
            int zero_cols = 0;
            for (long long v : row)
                if (v == 0) ++zero_cols;
            if (r_ == 1) {
                if (rem == 0 && zero_cols == 0) out.push_back(row);
                return;
            }
            if (rem < std::max(static_cast<long long>(r_ - 1),
                               static_cast<long long>(zero_cols)))
                return;
            out.push_back(row);
            return;
        }
        for (long long v = 0; v <= rem; ++v) {
            row[j] = v;
            first_rows_rec(row, j + 1, rem - v, out);
        }
        row[j] = 0;
    }

    int r_, s_;
    long long n_;
};

// Guarded exhaustive enumeration; returns the number of members visited.
template <typename Visitor>
unsigned long long enumerate_confusion_matrices(int r, int s, long long n, Visitor&& visit,
                                                unsigned long long guard = default_enumeration_guard) {
    BigUint expected = count_confusion_matrices(r, s, n);
    if (expected > BigUint(guard))
        throw EnumerationGuardError("enumeration size " + expected.to_string() +
                                    " exceeds guard " + std::to_string(guard));
    unsigned long long emitted = 0;
    MatrixEnumerator en(r, s, n);
    en.for_each([&](const long long* cells) {
        ++emitted;
        visit(cells);
    });
    return emitted;
}

// Uniform composition of n into k ordered nonnegative parts via a uniform
// bar placement: k-1 bar positions among n+k-1 slots (Floyd subset draw).
inline std::vector<long long> random_composition(long long n, long long k, SplitStream& stream) {
    if (n < 0 || k < 1) throw std::invalid_argument("random_composition: bad arguments");
    std::vector<long long> bars;
    bars.reserve(static_cast<std::size_t>(k - 1));
    const long long slots = n + k - 1;
    for (long long j = slots - (k - 1); j < slots; ++j) {
        long long t = static_cast<long long>(stream.below(static_cast<std::uint64_t>(j + 1)));
        auto it = std::lower_bound(bars.begin(), bars.end(), t);
        if (it != bars.end() && *it == t)
            bars.insert(std::lower_bound(bars.begin(), bars.end(), j), j);
        else
            bars.insert(it, t);
    }
    std::vector<long long> parts(static_cast<std::size_t>(k));
    long long prev = -1;
    for (long long i = 0; i < k - 1; ++i) {
        parts[static_cast<std::size_t>(i)] = bars[static_cast<std::size_t>(i)] - prev - 1;
        prev = bars[static_cast<std::size_t>(i)];
    }
    parts[static_cast<std::size_t>(k - 1)] = slots - 1 - prev;
    return parts;
}

struct SampleResult {
    ConfusionMatrix matrix;
    unsigned long long attempts = 0;
};

// Uniform member of the positive-margin family by rejection: draw a uniform
// composition of n into r*s parts, arrange it into the grid by columns, and
// retry while any margin is zero.
inline SampleResult sample_confusion_matrix(int r, int s, long long n, SplitStream& stream) {
    if (n < std::max(r, s))
        throw std::invalid_argument("sample_confusion_matrix: family is empty (n < max(r, s))");
    std::vector<long long> cells(static_cast<std::size_t>(r) * s);
    unsigned long long attempts = 0;
    for (;;) {
        ++attempts;
        std::vector<long long> comp = random_composition(n, static_cast<long long>(r) * s, stream);
        bool ok = true;
        for (int i = 0; i < r && ok; ++i) {
            long long m = 0;
            for (int j = 0; j < s; ++j) m += comp[static_cast<std::size_t>(j) * r + i];
            ok = m > 0;
        }
        for (int j = 0; j < s && ok; ++j) {
            long long m = 0;
            for (int i = 0; i < r; ++i) m += comp[static_cast<std::size_t>(j) * r + i];
            ok = m > 0;
        }
        if (!ok) continue;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < s; ++j)
                cells[static_cast<std::size_t>(i) * s + j] = comp[static_cast<std::size_t>(j) * r + i];
        return SampleResult{ConfusionMatrix(r, s, std::move(cells)), attempts};
    }
}

struct CardinalityEstimate {
    BigUint composition_count;      // J(n, r*s)
    unsigned long long samples = 0;
    unsigned long long accepted = 0;
    double acceptance_rate = 0.0;
    long double estimate = 0.0L;    // J * acceptance_rate
    long double std_error = 0.0L;   // binomial error propagated through J
};

// Monte Carlo estimate of the positive-margin family size.
inline CardinalityEstimate estimate_cardinality(int r, int s, long long n,
                                                unsigned long long samples, SplitStream& stream) {
    if (samples < 1) throw std::invalid_argument("estimate_cardinality: needs samples");
    CardinalityEstimate out;
    out.composition_count = count_compositions(n, static_cast<long long>(r) * s);
    out.samples = samples;
    for (unsigned long long t = 0; t < samples; ++t) {
        std::vector<long long> comp = random_composition(n, static_cast<long long>(r) * s, stream);
        bool ok = true;
        for (int i = 0; i < r && ok; ++i) {
            long long m = 0;
            for (int j = 0; j < s; ++j) m += comp[static_cast<std::size_t>(j) * r + i];
            ok = m > 0;
        }
        for (int j = 0; j < s && ok; ++j) {
            long long m = 0;
            for (int i = 0; i < r; ++i) m += comp[static_cast<std::size_t>(j) * r + i];
            ok = m > 0;
        }
        if (ok) ++out.accepted;
    }
    const long double J = out.composition_count.to_long_double();
    const long double rate = static_cast<long double>(out.accepted) / samples;
    out.acceptance_rate = static_cast<double>(rate);
    out.estimate = J * rate;
    out.std_error = J * std::sqrt(rate * (1.0L - rate) / samples);
    return out;
}

// n independent uniform labels on {1, ..., r}; the realized partition may use
// fewer than r clusters, which callers track rather than reject.
inline Labeling null_labels(long long n, int r, SplitStream& stream) {
    if (n < 1 || r < 1) throw std::invalid_argument("null_labels: bad arguments");
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (auto& v : idx) v = stream.index(r);
    return Labeling::from_indices(idx);
}

struct FoldedMaxProb {
    DyadicRational prob;
    bool two_support_points = false;  // odd n: the maximum is reached at two diagonal counts
};

// With two clusters, n * MED under the independent-uniform null is a folded
// Binomial(n, 1/2).  Probability that MED attains its maximum:
//   even n: P(D = n/2) with D the diagonal count;
//   odd n:  P(D in {(n-1)/2, (n+1)/2}), flagged as the two-point case.
inline FoldedMaxProb folded_binomial_max_prob(long long n) {
    if (n < 2) throw std::invalid_argument("folded_binomial_max_prob: n must be at least 2");
    FoldedMaxProb out;
    if (n % 2 == 0) {
        out.prob.num = BigUint::binomial(static_cast<unsigned long long>(n),
                                         static_cast<unsigned long long>(n / 2));
    } else {
        out.prob.num = BigUint::binomial(static_cast<unsigned long long>(n),
                                         static_cast<unsigned long long>((n - 1) / 2));
        out.prob.num.mul_u64(2);
        out.two_support_points = true;
    }
    out.prob.exp2 = static_cast<unsigned>(n);
    out.prob.reduce();
    return out;
}

// P(n * MED = m) for m = 0..floor(n/2); the masses sum to 1 exactly.
inline std::vector<DyadicRational> folded_binomial_pmf(long long n) {
    if (n < 2) throw std::invalid_argument("folded_binomial_pmf: n must be at least 2");
    std::vector<DyadicRational> pmf;
    pmf.reserve(static_cast<std::size_t>(n / 2) + 1);
    for (long long m = 0; m <= n / 2; ++m) {
        DyadicRational p;
        p.num = BigUint::binomial(static_cast<unsigned long long>(n),
                                  static_cast<unsigned long long>(m));
        if (m != n - m) p.num.mul_u64(2);
        p.exp2 = static_cast<unsigned>(n);
        p.reduce();
        pmf.push_back(std::move(p));
    }
    return pmf;
}

struct PerturbationResult {
    ConfusionMatrix base;
    ConfusionMatrix perturbed;
    long long moves = 0;
    Rational degree_of_overlap;  // moves / n
    Rational med_value;          // recomputed on the perturbed matrix
};

// Controlled-overlap perturbation: start from the diagonal matrix of two
// identical partitions and relocate `moves` objects.  Each move picks one
// object uniformly from those still on the diagonal (so cell (i, i) is chosen
// with probability proportional to its current count) and sends it to a
// uniformly chosen off-diagonal cell of its row.  The degree of overlap is
// moves / n; the MED of the result is recomputed, not assumed.
inline PerturbationResult perturb_from_diagonal(const std::vector<long long>& diagonal,
                                                long long moves, SplitStream& stream) {
    const int s = static_cast<int>(diagonal.size());
    if (s < 1) throw std::invalid_argument("perturb_from_diagonal: empty diagonal");
    long long n = 0;
    for (long long v : diagonal) {
        if (v < 1) throw std::invalid_argument("perturb_from_diagonal: diagonal entries must be positive");
        n += v;
    }
    if (moves < 0 || moves > n)
        throw std::invalid_argument("perturb_from_diagonal: moves exceed available diagonal mass");
    if (moves > 0 && s < 2)
        throw std::invalid_argument("perturb_from_diagonal: needs at least two clusters to relocate");

    std::vector<long long> cells(static_cast<std::size_t>(s) * s, 0);
    for (int i = 0; i < s; ++i) cells[static_cast<std::size_t>(i) * s + i] = diagonal[i];
    ConfusionMatrix base(s, s, cells);

    long long on_diagonal = n;
    for (long long m = 0; m < moves; ++m) {
        long long pick = static_cast<long long>(stream.below(static_cast<std::uint64_t>(on_diagonal)));
        int row = 0;
        for (; row < s; ++row) {
            long long here = cells[static_cast<std::size_t>(row) * s + row];
            if (pick < here) break;
            pick -= here;
        }
        long long dest = static_cast<long long>(stream.below(static_cast<std::uint64_t>(s - 1)));
        int col = static_cast<int>(dest < row ? dest : dest + 1);
        --cells[static_cast<std::size_t>(row) * s + row];
        ++cells[static_cast<std::size_t>(row) * s + col];
        --on_diagonal;
    }

    PerturbationResult out{std::move(base), ConfusionMatrix(s, s, std::move(cells)), moves,
                           Rational(moves, n), Rational(0)};
    out.med_value = med(out.perturbed).value;
    return out;
}

}  // namespace partdist
