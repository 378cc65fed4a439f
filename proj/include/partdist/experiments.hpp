#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "partdist/assignment.hpp"
#include "partdist/combinatorics.hpp"
#include "partdist/extremes.hpp"
#include "partdist/labeling.hpp"
#include "partdist/metrics.hpp"
#include "partdist/parallel.hpp"
#include "partdist/rng.hpp"
#include "partdist/summary.hpp"

namespace partdist {

// Stream path tags keep the derived generators of distinct experiments
// non-overlapping for one (seed, stream_id).
inline constexpr std::uint64_t stream_tag_null = 1;
inline constexpr std::uint64_t stream_tag_conditional_sample = 2;
inline constexpr std::uint64_t stream_tag_cardinality = 3;
inline constexpr std::uint64_t stream_tag_perturb = 4;

// Everything the tool reports about one pair of partitions.  Optional fields
// are absent when their defining expression is degenerate; each absence is
// explained in notes.
struct CriteriaReport {
    int r = 0, s = 0;
    long long n = 0;
    PairCounts pairs;
    MedResult med_result;
    Rational rd_value, ri_value, hamming_value;
    std::optional<Rational> erd_value, ard_value, ari_value;
    std::optional<Rational> max_med_value, nmed_value;
    std::optional<Rational> max_rd_value, nrd_value;
    std::vector<std::string> notes;
};

inline CriteriaReport compute_criteria(const ConfusionMatrix& m) {
    CriteriaReport rep;
    rep.r = m.rows();
    rep.s = m.cols();
    rep.n = m.total();
    rep.pairs = pair_counts(m);
    rep.med_result = med(m);
    rep.rd_value = rand_distance(rep.pairs);
    rep.ri_value = rand_index(rep.pairs);
    rep.hamming_value = hamming_empirical(m);

    const Rational e = expected_rd(rep.pairs);
    if (e.is_zero()) {
        rep.notes.push_back("ard undefined: expected rand distance is zero");
    } else {
        rep.erd_value = e;
        rep.ard_value = rep.rd_value / e;
        rep.ari_value = Rational(1) - *rep.ard_value;
    }

    const int q = std::max(rep.r, rep.s);
    if (q >= 2) {
        const Rational mm = max_med(rep.r, rep.s, rep.n);
        rep.max_med_value = mm;
        if (!mm.is_zero())
            rep.nmed_value = rep.med_result.value / mm;
        else
            rep.notes.push_back("nmed undefined: the misclassification maximum is zero");
    } else {
        rep.notes.push_back("nmed undefined: single cluster on both sides");
    }

    const int lo = std::min(rep.r, rep.s), hi = std::max(rep.r, rep.s);
    if (lo >= 2 && rep.n >= 2LL * (lo - 1) + hi) {
        const Rational mr = max_rd(rep.r, rep.s, rep.n);
        rep.max_rd_value = mr;
        if (!mr.is_zero())
            rep.nrd_value = rep.rd_value / mr;
        else
            rep.notes.push_back("nrd undefined: the rand-distance maximum is zero");
    } else {
        rep.notes.push_back("nrd undefined: shape outside the n >= 2(r-1)+s closed-form domain");
    }
    return rep;
}

// Null model: two independent label vectors, uniform over fixed cluster
// counts, crossed and measured; B replicates.  NMED and NRD always use the
// nominal (r, s, n) normalizers even when a draw realizes fewer clusters.
struct NullStudyResult {
    int r = 0, s = 0;
    long long n = 0;
    unsigned long long replicates = 0;
    DistributionSummary med, rd, ard;
    std::optional<DistributionSummary> nmed, nrd;
    unsigned long long ard_undefined = 0;
    unsigned long long reduced_label_draws = 0;  // draws realizing < r or < s clusters
};

inline NullStudyResult null_case_study(int r, int s, long long n, unsigned long long B,
                                       const SamplerConfig& cfg, int workers = 1) {
    if (r < 1 || s < 1 || n < 2 || B < 1)
        throw std::invalid_argument("null_case_study: needs r,s >= 1, n >= 2, B >= 1");

    const long long rd_den = choose2(n);
    const int q = std::max(r, s);
    // Nominal normalizers: the drawn labels come from {1..r} x {1..s}, so the
    // scale of NMED and NRD is fixed by the design, not by realized clusters.
    const bool nmed_defined = q >= 2 && q <= n && !max_med(r, s, n).is_zero();
    const long long nmed_den = nmed_defined ? n - (n + q - 1) / q : 0;
    const int lo = std::min(r, s), hi = q;
    const bool nrd_defined = lo >= 2 && n >= 2LL * (lo - 1) + hi && !max_rd(r, s, n).is_zero();
    Rational mrd = nrd_defined ? max_rd(r, s, n) : Rational(1);
    // NRD = (bc / C(n,2)) / (p/q) = bc*q over C(n,2)*p, one fixed denominator.
    const long long nrd_den = nrd_defined ? rd_den * mrd.num() : 0;

    struct Block {
        DistributionSummary med, rd, ard;
        std::optional<DistributionSummary> nmed, nrd;
        unsigned long long ard_undefined = 0;
        unsigned long long reduced = 0;
    };
    auto make_block = [&] {
        Block b{DistributionSummary::exact("med", n), DistributionSummary::exact("rd", rd_den),
                DistributionSummary::binned("ard"), std::nullopt, std::nullopt, 0, 0};
        if (nmed_defined) b.nmed = DistributionSummary::exact("nmed", nmed_den);
        if (nrd_defined) b.nrd = DistributionSummary::exact("nrd", nrd_den);
        return b;
    };

    constexpr unsigned long long kBlock = 256;
    const std::size_t blocks = static_cast<std::size_t>((B + kBlock - 1) / kBlock);
    std::vector<Block> parts;
    parts.reserve(blocks);
    for (std::size_t i = 0; i < blocks; ++i) parts.push_back(make_block());

    run_blocks(blocks, workers, [&](std::size_t bi) {
        Block& blk = parts[bi];
        const unsigned long long first = bi * kBlock;
        const unsigned long long last = std::min<unsigned long long>(B, first + kBlock);
        for (unsigned long long rep = first; rep < last; ++rep) {
            SplitStream stream(cfg, {stream_tag_null, rep});
            const Labeling u = null_labels(n, r, stream);
            const Labeling v = null_labels(n, s, stream);
            if (u.cluster_count() < r || v.cluster_count() < s) ++blk.reduced;
            const ConfusionMatrix ct = ConfusionMatrix::crosstab(u, v);
            const PairCounts pc = pair_counts(ct);
            const long long med_num = (med(ct).value * Rational(n)).num();
            blk.med.add_exact(med_num);
            blk.rd.add_exact(pc.b + pc.c);
            if (blk.nmed) blk.nmed->add_exact(med_num);
            if (blk.nrd) blk.nrd->add_exact((pc.b + pc.c) * mrd.den());
            const int128 den = int128(pc.a + pc.b) * (pc.b + pc.d) +
                               int128(pc.a + pc.c) * (pc.c + pc.d);
            if (den == 0)
                ++blk.ard_undefined;
            else
                blk.ard.add_value(
                    Rational::from_int128(int128(choose2(ct.total())) * (pc.b + pc.c), den));
        }
    });

    NullStudyResult out{r, s, n, B, make_block().med, make_block().rd, make_block().ard,
                        std::nullopt, std::nullopt, 0, 0};
    if (nmed_defined) out.nmed = DistributionSummary::exact("nmed", nmed_den);
    if (nrd_defined) out.nrd = DistributionSummary::exact("nrd", nrd_den);
    for (const Block& blk : parts) {
        out.med.merge(blk.med);
        out.rd.merge(blk.rd);
        out.ard.merge(blk.ard);
        if (out.nmed) out.nmed->merge(*blk.nmed);
        if (out.nrd) out.nrd->merge(*blk.nrd);
        out.ard_undefined += blk.ard_undefined;
        out.reduced_label_draws += blk.reduced;
    }
    return out;
}

// Fig-1-style per-d1 table for 2x2 matrices; delegates to the closed forms
// plus the ARD slice enumeration.
inline std::vector<TwoByTwoRow> two_by_two_figure(long long n) { return two_by_two_profile(n); }

// NRD of perfectly unrelated labelings across shapes and sizes.
struct IndependentCurvePoint {
    int r = 0, s = 0;
    long long n = 0;
    bool defined = false;
    std::string note;
    Rational independent_rd_value, max_rd_value, nrd_value;
};

inline std::vector<IndependentCurvePoint> nrd_independent_curve(
    const std::vector<std::pair<int, int>>& pairs, const std::vector<long long>& n_values) {
    std::vector<IndependentCurvePoint> out;
    for (const auto& [r, s] : pairs) {
        for (long long n : n_values) {
            IndependentCurvePoint p;
            p.r = r;
            p.s = s;
            p.n = n;
            const int lo = std::min(r, s), hi = std::max(r, s);
            if (n % (static_cast<long long>(r) * s) != 0) {
                p.note = "skipped: n is not a multiple of r*s";
            } else if (lo < 2 || n < 2LL * (lo - 1) + hi) {
                p.note = "skipped: outside the max-RD closed-form domain";
            } else {
                p.defined = true;
                p.independent_rd_value = independent_rd(r, s, n);
                p.max_rd_value = max_rd(r, s, n);
                p.nrd_value = p.independent_rd_value / p.max_rd_value;
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

namespace detail {
inline void accumulate_conditional(ConditionalTable& tbl, int r, int s, long long n,
                                   const long long* cells) {
    const long long med_num = n - best_agreement_raw(r, s, cells);
    const PairCounts pc = pair_counts_raw(r, s, cells);
    const long long rd_num = pc.b + pc.c;
    std::optional<Rational> ard;
    const int128 den =
        int128(pc.a + pc.b) * (pc.b + pc.d) + int128(pc.a + pc.c) * (pc.c + pc.d);
    if (den != 0) ard = Rational::from_int128(int128(choose2(n)) * rd_num, den);
    tbl.add(med_num, rd_num, ard, cells);
}
inline void require_enumerable(int r, int s, long long n, unsigned long long guard) {
    if (count_confusion_matrices(r, s, n) > BigUint(guard))
        throw EnumerationGuardError("family size for (" + std::to_string(r) + "," +
                                    std::to_string(s) + "," + std::to_string(n) +
                                    ") exceeds the enumeration guard of " +
                                    std::to_string(guard));
}
}  // namespace detail

// One exhaustive pass over the family, keyed by exact MED value.
inline ConditionalTable conditional_given_med_exhaustive(
    int r, int s, long long n, unsigned long long guard = default_enumeration_guard,
    int workers = 1) {
    detail::require_enumerable(r, s, n, guard);
    MatrixEnumerator en(r, s, n);
    const auto first_rows = en.first_rows();
    std::vector<ConditionalTable> parts(first_rows.size(), ConditionalTable(r, s, n));
    run_blocks(first_rows.size(), workers, [&](std::size_t b) {
        en.for_each_with_first_row(first_rows[b], [&](const long long* cells) {
            detail::accumulate_conditional(parts[b], r, s, n, cells);
        });
    });
    ConditionalTable out(r, s, n);
    for (const auto& p : parts) out.merge(p);
    return out;
}

// Same accumulation over uniform draws instead of the full family.
struct SampledConditionalResult {
    ConditionalTable table;
    unsigned long long attempts = 0;  // rejection-sampling attempts across draws
};

inline SampledConditionalResult conditional_given_med_sampled(int r, int s, long long n,
                                                              unsigned long long samples,
                                                              const SamplerConfig& cfg,
                                                              int workers = 1) {
    if (samples < 1) throw std::invalid_argument("conditional_given_med_sampled: needs samples");
    constexpr unsigned long long kBlock = 65536;
    const std::size_t blocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
    std::vector<ConditionalTable> parts(blocks, ConditionalTable(r, s, n));
    std::vector<unsigned long long> attempts(blocks, 0);
    run_blocks(blocks, workers, [&](std::size_t b) {
        SplitStream stream(cfg, {stream_tag_conditional_sample, static_cast<std::uint64_t>(b)});
        const unsigned long long first = b * kBlock;
        const unsigned long long last = std::min<unsigned long long>(samples, first + kBlock);
        for (unsigned long long t = first; t < last; ++t) {
            const SampleResult draw = sample_confusion_matrix(r, s, n, stream);
            attempts[b] += draw.attempts;
            detail::accumulate_conditional(parts[b], r, s, n, draw.matrix.cells().data());
        }
    });
    SampledConditionalResult out{ConditionalTable(r, s, n), 0};
    for (std::size_t b = 0; b < blocks; ++b) {
        out.table.merge(parts[b]);
        out.attempts += attempts[b];
    }
    return out;
}

// Distribution of MED alone over the full family (uniform weight per matrix).
inline DistributionSummary med_marginal(int r, int s, long long n,
                                        unsigned long long guard = default_enumeration_guard,
                                        int workers = 1) {
    detail::require_enumerable(r, s, n, guard);
    MatrixEnumerator en(r, s, n);
    const auto first_rows = en.first_rows();
    std::vector<DistributionSummary> parts;
    parts.reserve(first_rows.size());
    for (std::size_t i = 0; i < first_rows.size(); ++i)
        parts.push_back(DistributionSummary::exact("med", n));
    run_blocks(first_rows.size(), workers, [&](std::size_t b) {
        en.for_each_with_first_row(first_rows[b], [&](const long long* cells) {
            parts[b].add_exact(n - best_agreement_raw(r, s, cells));
        });
    });
    DistributionSummary out = DistributionSummary::exact("med", n);
    for (const auto& p : parts) out.merge(p);
    return out;
}

}  // namespace partdist
