#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace partdist {

// A partition of {0, ..., n-1} stored as cluster indices.  Indices are
// contiguous, 0-based, and numbered by first occurrence, so two label
// sequences that differ only by renaming produce identical Labelings.
class Labeling {
public:
    template <typename Iterator>
    static Labeling from_tokens(Iterator first, Iterator last) {
        using Token = typename std::iterator_traits<Iterator>::value_type;
        std::map<Token, int> seen;
        Labeling out;
        for (; first != last; ++first) {
            auto [it, inserted] = seen.emplace(*first, static_cast<int>(seen.size()));
            out.indices_.push_back(it->second);
        }
        if (out.indices_.empty()) throw std::invalid_argument("Labeling: empty input");
        out.cluster_count_ = static_cast<int>(seen.size());
        return out;
    }

    template <typename Container>
    static Labeling from_tokens(const Container& tokens) {
        return from_tokens(tokens.begin(), tokens.end());
    }

    static Labeling from_indices(const std::vector<int>& raw) {
        return from_tokens(raw.begin(), raw.end());
    }

    long long size() const { return static_cast<long long>(indices_.size()); }
    int cluster_count() const { return cluster_count_; }
    int operator[](long long i) const { return indices_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& indices() const { return indices_; }

private:
    Labeling() : cluster_count_(0) {}

    std::vector<int> indices_;
    int cluster_count_;
};

// Cross-tabulation of two partitions of the same objects: cell (i, j) counts
// the objects in cluster i of the first partition and cluster j of the
// second.  Margins and the total are cached at construction.
class ConfusionMatrix {
public:
    ConfusionMatrix(int rows, int cols, std::vector<long long> cells)
        : rows_(rows), cols_(cols), cells_(std::move(cells)) {
        if (rows_ < 1 || cols_ < 1)
            throw std::invalid_argument("ConfusionMatrix: dimensions must be positive");
        if (cells_.size() != static_cast<std::size_t>(rows_) * cols_)
            throw std::invalid_argument("ConfusionMatrix: cell count does not match dimensions");
        row_margins_.assign(rows_, 0);
        col_margins_.assign(cols_, 0);
        total_ = 0;
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) {
                long long v = cells_[static_cast<std::size_t>(i) * cols_ + j];
                if (v < 0) throw std::invalid_argument("ConfusionMatrix: negative cell");
                row_margins_[i] += v;
                col_margins_[j] += v;
                total_ += v;
            }
        }
        if (total_ < 1) throw std::invalid_argument("ConfusionMatrix: empty matrix");
    }

    static ConfusionMatrix crosstab(const Labeling& u, const Labeling& v) {
        if (u.size() != v.size())
            throw std::invalid_argument("crosstab: labelings cover different object counts");
        int r = u.cluster_count(), s = v.cluster_count();
        std::vector<long long> cells(static_cast<std::size_t>(r) * s, 0);
        for (long long i = 0; i < u.size(); ++i)
            ++cells[static_cast<std::size_t>(u[i]) * s + v[i]];
        return ConfusionMatrix(r, s, std::move(cells));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long long total() const { return total_; }
    long long at(int i, int j) const { return cells_[static_cast<std::size_t>(i) * cols_ + j]; }
    long long row_margin(int i) const { return row_margins_[i]; }
    long long col_margin(int j) const { return col_margins_[j]; }
    const std::vector<long long>& cells() const { return cells_; }

    // Member of the canonical family: every row and column margin positive.
    bool is_canonical() const {
        for (long long m : row_margins_)
            if (m == 0) return false;
        for (long long m : col_margins_)
            if (m == 0) return false;
        return true;
    }

    ConfusionMatrix transposed() const {
        std::vector<long long> t(cells_.size());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                t[static_cast<std::size_t>(j) * rows_ + i] = at(i, j);
        return ConfusionMatrix(cols_, rows_, std::move(t));
    }

    friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
    }

    std::string to_string() const {
        std::string out = "[";
        for (int i = 0; i < rows_; ++i) {
            out += i ? ",[" : "[";
            for (int j = 0; j < cols_; ++j) {
                if (j) out += ',';
                out += std::to_string(at(i, j));
            }
            out += ']';
        }
        out += ']';
        return out;
    }

private:
    int rows_, cols_;
    std::vector<long long> cells_;
    std::vector<long long> row_margins_, col_margins_;
    long long total_;
};

}  // namespace partdist
