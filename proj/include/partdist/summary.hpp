#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "partdist/labeling.hpp"
#include "partdist/rational.hpp"

namespace partdist {

// Compensated floating-point accumulator for values that do not share a
// common denominator (sums stay accurate over millions of terms).
struct KahanAccumulator {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    void merge(const KahanAccumulator& o) {
        add(o.sum);
        add(-o.carry);
    }
};

// Streaming one-criterion distribution summary.
//
// Exact mode: every observation is numerator/denominator for one fixed
// denominator; moments and quantiles are computed from an exact
// numerator-indexed histogram.  Binned mode (used when observations share no
// denominator): compensated floating moments plus a fixed-width histogram;
// extremes are still tracked exactly.
class DistributionSummary {
public:
    static DistributionSummary exact(std::string name, long long denominator) {
        if (denominator <= 0) throw std::invalid_argument("summary: denominator must be positive");
        DistributionSummary s;
        s.name_ = std::move(name);
        s.den_ = denominator;
        return s;
    }
    static DistributionSummary binned(std::string name, double bin_width = 0.01) {
        if (!(bin_width > 0)) throw std::invalid_argument("summary: bin width must be positive");
        DistributionSummary s;
        s.name_ = std::move(name);
        s.bin_width_ = bin_width;
        return s;
    }

    bool is_exact() const { return den_ > 0; }
    const std::string& name() const { return name_; }
    long long denominator() const { return den_; }
    double bin_width() const { return bin_width_; }
    unsigned long long count() const { return count_; }

    void add_exact(long long numerator) { add_exact_bulk(numerator, 1); }

    void add_exact_bulk(long long numerator, unsigned long long repeat) {
        if (!is_exact()) throw std::logic_error("summary: add_exact on a binned summary");
        count_ += repeat;
        sum_num_ += int128(numerator) * static_cast<long long>(repeat);
        sumsq_num_ += int128(numerator) * numerator * static_cast<long long>(repeat);
        support_[numerator] += repeat;
    }

    void add_value(const Rational& value) {
        if (is_exact()) throw std::logic_error("summary: add_value on an exact summary");
        ++count_;
        const double x = value.to_double();
        sum_.add(x);
        sumsq_.add(x * x);
        if (!min_ || value < *min_) min_ = value;
        if (!max_ || *max_ < value) max_ = value;
        long long bin = static_cast<long long>(std::floor(x / bin_width_));
        if (bin < 0) bin = 0;  // criteria here are nonnegative; clamp defensively
        ++support_[bin];
    }

    void merge(const DistributionSummary& o) {
        if (is_exact() != o.is_exact() || den_ != o.den_ || bin_width_ != o.bin_width_)
            throw std::logic_error("summary: merging incompatible summaries");
        count_ += o.count_;
        sum_num_ += o.sum_num_;
        sumsq_num_ += o.sumsq_num_;
        sum_.merge(o.sum_);
        sumsq_.merge(o.sumsq_);
        if (o.min_ && (!min_ || *o.min_ < *min_)) min_ = o.min_;
        if (o.max_ && (!max_ || *max_ < *o.max_)) max_ = o.max_;
        for (const auto& [k, c] : o.support_) support_[k] += c;
    }

    // Exact mean as a rational (exact mode only).
    Rational mean_exact() const {
        require_nonempty();
        if (!is_exact()) throw std::logic_error("summary: exact mean unavailable in binned mode");
        return Rational::from_int128(sum_num_, int128(den_) * static_cast<long long>(count_));
    }

    double mean() const {
        require_nonempty();
        if (is_exact())
            return static_cast<double>(to_long_double(sum_num_) / (static_cast<long double>(den_) * count_));
        return sum_.sum / static_cast<double>(count_);
    }

    // Sample standard deviation (n-1 denominator); 0 for a single observation.
    double stddev() const {
        require_nonempty();
        if (count_ < 2) return 0.0;
        long double var;
        if (is_exact()) {
            const long double k = static_cast<long double>(count_);
            const long double s1 = to_long_double(sum_num_);
            const long double s2 = to_long_double(sumsq_num_);
            var = (s2 - s1 * s1 / k) / (k - 1) / (static_cast<long double>(den_) * den_);
        } else {
            const long double k = static_cast<long double>(count_);
            var = (static_cast<long double>(sumsq_.sum) -
                   static_cast<long double>(sum_.sum) * sum_.sum / k) / (k - 1);
        }
        if (var < 0) var = 0;  // rounding guard
        return static_cast<double>(std::sqrt(var));
    }

    std::optional<Rational> min_value() const {
        if (count_ == 0) return std::nullopt;
        if (is_exact()) return Rational(support_.begin()->first, den_);
        return min_;
    }
    std::optional<Rational> max_value() const {
        if (count_ == 0) return std::nullopt;
        if (is_exact()) return Rational(support_.rbegin()->first, den_);
        return max_;
    }

    // Empirical quantile.  Exact mode: smallest observed value whose
    // cumulative count reaches p (a realized value, exact).  Binned mode:
    // linear interpolation inside the covering bin.
    double quantile(double p) const {
        require_nonempty();
        if (p < 0 || p > 1) throw std::invalid_argument("summary: quantile level outside [0,1]");
        const long double target = p * static_cast<long double>(count_);
        unsigned long long cum = 0;
        for (const auto& [k, c] : support_) {
            const unsigned long long before = cum;
            cum += c;
            if (static_cast<long double>(cum) >= target) {
                if (is_exact()) return Rational(k, den_).to_double();
                const long double lo = static_cast<long double>(k) * bin_width_;
                const long double frac = c == 0 ? 0.0L : (target - before) / c;
                return static_cast<double>(lo + bin_width_ * std::max(0.0L, std::min(1.0L, frac)));
            }
        }
        return is_exact() ? Rational(support_.rbegin()->first, den_).to_double()
                          : static_cast<double>((support_.rbegin()->first + 1) * bin_width_);
    }

    struct Fences {
        double lower, upper;  // p25 - 1.5 IQR, p75 + 1.5 IQR
    };
    Fences whisker_fences() const {
        const double q1 = quantile(0.25), q3 = quantile(0.75);
        const double iqr = q3 - q1;
        return {q1 - 1.5 * iqr, q3 + 1.5 * iqr};
    }

    // Histogram rows: (key, count).  Exact mode keys are numerators of
    // key/denominator; binned mode keys are bin indices of [k*w, (k+1)*w).
    const std::map<long long, unsigned long long>& histogram() const { return support_; }

    unsigned long long histogram_total() const {
        unsigned long long t = 0;
        for (const auto& [k, c] : support_) t += c;
        return t;
    }

private:
    void require_nonempty() const {
        if (count_ == 0) throw std::logic_error("summary: no observations");
    }

    std::string name_;
    long long den_ = 0;       // > 0 in exact mode
    double bin_width_ = 0.0;  // > 0 in binned mode
    unsigned long long count_ = 0;
    int128 sum_num_ = 0, sumsq_num_ = 0;
    KahanAccumulator sum_, sumsq_;
    std::optional<Rational> min_, max_;
    std::map<long long, unsigned long long> support_;
};

// Per-MED-value accumulation of RD and ARD over a family of matrices,
// with global extrema and their first witnesses in stream order.
class ConditionalTable {
public:
    struct Slice {
        unsigned long long count = 0;
        int128 rd_sum_num = 0, rd_sumsq_num = 0;
        long long rd_min_num = std::numeric_limits<long long>::max();
        long long rd_max_num = -1;
        std::map<long long, unsigned long long> rd_hist;  // RD numerator -> count
        unsigned long long ard_defined = 0;
        KahanAccumulator ard_sum, ard_sumsq;
        std::optional<Rational> ard_min, ard_max;
    };

    ConditionalTable(int r, int s, long long n)
        : r_(r), s_(s), n_(n), rd_den_(choose2(n)) {}

    int r() const { return r_; }
    int s() const { return s_; }
    long long n() const { return n_; }
    long long rd_denominator() const { return rd_den_; }
    unsigned long long total() const { return total_; }
    unsigned long long ard_undefined() const { return ard_undefined_; }

    // med_numerator is over denominator n; rd_numerator over C(n,2).
    void add(long long med_numerator, long long rd_numerator,
             const std::optional<Rational>& ard, const long long* cells) {
        ++total_;
        Slice& sl = slices_[med_numerator];
        ++sl.count;
        sl.rd_sum_num += rd_numerator;
        sl.rd_sumsq_num += int128(rd_numerator) * rd_numerator;
        sl.rd_min_num = std::min(sl.rd_min_num, rd_numerator);
        sl.rd_max_num = std::max(sl.rd_max_num, rd_numerator);
        ++sl.rd_hist[rd_numerator];
        if (rd_numerator > rd_max_num_) {
            rd_max_num_ = rd_numerator;
            rd_witness_.assign(cells, cells + static_cast<std::size_t>(r_) * s_);
        }
        if (ard) {
            ++sl.ard_defined;
            const double x = ard->to_double();
            sl.ard_sum.add(x);
            sl.ard_sumsq.add(x * x);
            if (!sl.ard_min || *ard < *sl.ard_min) sl.ard_min = *ard;
            if (!sl.ard_max || *sl.ard_max < *ard) sl.ard_max = *ard;
            if (!ard_max_ || *ard_max_ < *ard) {
                ard_max_ = *ard;
                ard_witness_.assign(cells, cells + static_cast<std::size_t>(r_) * s_);
                ard_max_med_num_ = med_numerator;
            }
        } else {
            ++ard_undefined_;
        }
    }

    // Merge preserves first-witness semantics when tables are merged in
    // stream order: ties keep the earlier witness.
    void merge(const ConditionalTable& o) {
        if (r_ != o.r_ || s_ != o.s_ || n_ != o.n_)
            throw std::logic_error("conditional table: merging incompatible tables");
        total_ += o.total_;
        ard_undefined_ += o.ard_undefined_;
        for (const auto& [key, osl] : o.slices_) {
            Slice& sl = slices_[key];
            sl.count += osl.count;
            sl.rd_sum_num += osl.rd_sum_num;
            sl.rd_sumsq_num += osl.rd_sumsq_num;
            sl.rd_min_num = std::min(sl.rd_min_num, osl.rd_min_num);
            sl.rd_max_num = std::max(sl.rd_max_num, osl.rd_max_num);
            for (const auto& [num, cnt] : osl.rd_hist) sl.rd_hist[num] += cnt;
            sl.ard_defined += osl.ard_defined;
            sl.ard_sum.merge(osl.ard_sum);
            sl.ard_sumsq.merge(osl.ard_sumsq);
            if (osl.ard_min && (!sl.ard_min || *osl.ard_min < *sl.ard_min)) sl.ard_min = osl.ard_min;
            if (osl.ard_max && (!sl.ard_max || *sl.ard_max < *osl.ard_max)) sl.ard_max = osl.ard_max;
        }
        if (o.rd_max_num_ > rd_max_num_) {
            rd_max_num_ = o.rd_max_num_;
            rd_witness_ = o.rd_witness_;
        }
        if (o.ard_max_ && (!ard_max_ || *ard_max_ < *o.ard_max_)) {
            ard_max_ = o.ard_max_;
            ard_witness_ = o.ard_witness_;
            ard_max_med_num_ = o.ard_max_med_num_;
        }
    }

    const std::map<long long, Slice>& slices() const { return slices_; }

    Rational rd_max() const {
        require_nonempty();
        return Rational(rd_max_num_, rd_den_);
    }
    Rational ard_max() const {
        if (!ard_max_) throw std::logic_error("conditional table: no defined ard observed");
        return *ard_max_;
    }
    ConfusionMatrix rd_max_witness() const {
        require_nonempty();
        return ConfusionMatrix(r_, s_, rd_witness_);
    }
    ConfusionMatrix ard_max_witness() const {
        if (!ard_max_) throw std::logic_error("conditional table: no defined ard observed");
        return ConfusionMatrix(r_, s_, ard_witness_);
    }
    // MED (over denominator n) of the matrix attaining the ARD maximum.
    Rational ard_max_med() const {
        if (!ard_max_) throw std::logic_error("conditional table: no defined ard observed");
        return Rational(ard_max_med_num_, n_);
    }

    double slice_rd_mean(const Slice& sl) const {
        return static_cast<double>(to_long_double(sl.rd_sum_num) /
                                   (static_cast<long double>(rd_den_) * sl.count));
    }
    double slice_ard_mean(const Slice& sl) const {
        return sl.ard_defined == 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : sl.ard_sum.sum / static_cast<double>(sl.ard_defined);
    }
    double slice_rd_stddev(const Slice& sl) const {
        if (sl.count < 2) return 0.0;
        const long double k = static_cast<long double>(sl.count);
        const long double s1 = to_long_double(sl.rd_sum_num);
        const long double s2 = to_long_double(sl.rd_sumsq_num);
        long double var = (s2 - s1 * s1 / k) / (k - 1) /
                          (static_cast<long double>(rd_den_) * rd_den_);
        if (var < 0) var = 0;
        return static_cast<double>(std::sqrt(var));
    }
    double slice_ard_stddev(const Slice& sl) const {
        if (sl.ard_defined < 2) return 0.0;
        const long double k = static_cast<long double>(sl.ard_defined);
        long double var = (static_cast<long double>(sl.ard_sumsq.sum) -
                           static_cast<long double>(sl.ard_sum.sum) * sl.ard_sum.sum / k) /
                          (k - 1);
        if (var < 0) var = 0;
        return static_cast<double>(std::sqrt(var));
    }

    // MED key (numerator over n) whose slice has the largest mean ARD among
    // slices with at least min_count observations.
    std::optional<long long> ard_mean_argmax_key(unsigned long long min_count = 1) const {
        std::optional<long long> best;
        double best_mean = -std::numeric_limits<double>::infinity();
        for (const auto& [key, sl] : slices_) {
            if (sl.count < min_count || sl.ard_defined == 0) continue;
            const double m = slice_ard_mean(sl);
            if (m > best_mean) {
                best_mean = m;
                best = key;
            }
        }
        return best;
    }

    // Marginal distribution of MED over the processed family.
    DistributionSummary med_marginal() const {
        DistributionSummary s = DistributionSummary::exact("med", n_);
        for (const auto& [key, sl] : slices_) s.add_exact_bulk(key, sl.count);
        return s;
    }

private:
    void require_nonempty() const {
        if (total_ == 0) throw std::logic_error("conditional table: empty");
    }

    int r_, s_;
    long long n_;
    long long rd_den_;
    unsigned long long total_ = 0;
    unsigned long long ard_undefined_ = 0;
    std::map<long long, Slice> slices_;
    long long rd_max_num_ = -1;
    std::optional<Rational> ard_max_;
    std::vector<long long> rd_witness_, ard_witness_;
    long long ard_max_med_num_ = 0;
};

}  // namespace partdist
