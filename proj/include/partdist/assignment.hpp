#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "partdist/labeling.hpp"
#include "partdist/rational.hpp"

namespace partdist {

// Square integer cost grid for the assignment step.  For a confusion matrix
// oriented with rows <= cols and zero-padded to square, cell (i, j) holds
// row_margin(i) + col_margin(j) - 2 * n_ij, the number of objects that
// disagree when cluster i is matched to cluster j.
class CostMatrix {
public:
    CostMatrix(int dim, std::vector<long long> costs) : dim_(dim), costs_(std::move(costs)) {
        if (dim_ < 1) throw std::invalid_argument("CostMatrix: dimension must be positive");
        if (costs_.size() != static_cast<std::size_t>(dim_) * dim_)
            throw std::invalid_argument("CostMatrix: cost count does not match dimension");
    }

    // Matching costs for the transfer-distance problem.  The matrix is
    // transposed if needed so that rows <= cols, then padded with zero rows.
    static CostMatrix med_costs(const ConfusionMatrix& m, bool* transposed = nullptr) {
        bool flip = m.rows() > m.cols();
        if (transposed) *transposed = flip;
        const ConfusionMatrix* src = &m;
        ConfusionMatrix t(1, 1, {1});
        if (flip) {
            t = m.transposed();
            src = &t;
        }
        int r = src->rows(), s = src->cols();
        std::vector<long long> costs(static_cast<std::size_t>(s) * s);
        for (int i = 0; i < s; ++i) {
            for (int j = 0; j < s; ++j) {
                long long c = src->col_margin(j);
                if (i < r) c += src->row_margin(i) - 2 * src->at(i, j);
                costs[static_cast<std::size_t>(i) * s + j] = c;
            }
        }
        return CostMatrix(s, std::move(costs));
    }

    int dim() const { return dim_; }
    long long at(int i, int j) const { return costs_[static_cast<std::size_t>(i) * dim_ + j]; }
    const std::vector<long long>& costs() const { return costs_; }

private:
    int dim_;
    std::vector<long long> costs_;
};

// A minimum-cost perfect matching: column assigned to each row plus its total.
struct Assignment {
    std::vector<int> col_of_row;
    long long total_cost = 0;
};

// Shortest-augmenting-path solver with integer potentials (Jonker-Volgenant
// scheme).  Exact integer arithmetic throughout; ties between equally short
// augmenting paths are broken toward the smallest column index, so the
// returned matching is deterministic.
inline Assignment solve_lsap(const CostMatrix& cost) {
    const int n = cost.dim();
    const long long INF = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0), min_to(n + 1);
    std::vector<int> row_of_col(n + 1, 0), prev_col(n + 1, 0);
    std::vector<char> used(n + 1);

    for (int i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        int j0 = 0;
        std::fill(min_to.begin(), min_to.end(), INF);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            int i0 = row_of_col[j0], j1 = -1;
            long long delta = INF;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long long reduced = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (reduced < min_to[j]) {
                    min_to[j] = reduced;
                    prev_col[j] = j0;
                }
                if (min_to[j] < delta) {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[j0] != 0);
        do {
            int j1 = prev_col[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        } while (j0);
    }

    Assignment out;
    out.col_of_row.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (row_of_col[j] > 0) out.col_of_row[row_of_col[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i) out.total_cost += cost.at(i, out.col_of_row[i]);
    return out;
}

struct MedResult {
    Rational value;
    Assignment assignment;  // over the rows <= cols orientation, padded square
    bool transposed = false;
};

// Misclassification error distance: smallest fraction of objects whose
// cluster membership must change to turn one partition into the other,
// found as an optimal assignment over cluster matchings.
inline MedResult med(const ConfusionMatrix& m) {
    MedResult out;
    CostMatrix costs = CostMatrix::med_costs(m, &out.transposed);
    out.assignment = solve_lsap(costs);
    out.value = Rational(out.assignment.total_cost, 2 * m.total());
    return out;
}

inline MedResult med(const Labeling& a, const Labeling& b) {
    return med(ConfusionMatrix::crosstab(a, b));
}

// Largest total agreement over injective cluster matchings, by direct scan of
// all placements.  Shared by the brute-force checker and enumeration loops.
inline long long best_agreement_raw(int rows, int cols, const long long* cells) {
    if (rows > cols) {
        // scan column-injections of the transpose without materializing it
        std::vector<long long> t(static_cast<std::size_t>(rows) * cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                t[static_cast<std::size_t>(j) * rows + i] = cells[static_cast<std::size_t>(i) * cols + j];
        return best_agreement_raw(cols, rows, t.data());
    }
    std::vector<int> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long tally = 0;
        for (int i = 0; i < rows; ++i)
            tally += cells[static_cast<std::size_t>(i) * cols + perm[i]];
        best = std::max(best, tally);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Factorial-time reference for the assignment solver; guarded to tiny sizes.
inline Rational brute_force_med(const ConfusionMatrix& m) {
    if (std::max(m.rows(), m.cols()) > 8)
        throw std::invalid_argument("brute_force_med: dimension above brute-force guard");
    long long agree = best_agreement_raw(m.rows(), m.cols(), m.cells().data());
    return Rational(m.total() - agree, m.total());
}

}  // namespace partdist
