#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include <partdist/experiments.hpp>

using partdist::ConditionalTable;
using partdist::ConfusionMatrix;
using partdist::CriteriaReport;
using partdist::Rational;
using partdist::SamplerConfig;

namespace {

bool has_note(const CriteriaReport& rep, const std::string& needle) {
    for (const std::string& note : rep.notes)
        if (note.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("the criteria report fills every well-defined field") {
    const ConfusionMatrix iris(3, 3, {50, 0, 0, 0, 48, 2, 0, 1, 49});
    const CriteriaReport rep = partdist::compute_criteria(iris);
    CHECK(rep.r == 3);
    CHECK(rep.s == 3);
    CHECK(rep.n == 150);
    CHECK(rep.pairs.a == 3530);
    CHECK(rep.pairs.b + rep.pairs.c == 291);
    CHECK(rep.med_result.value == Rational(1, 50));
    CHECK(rep.rd_value == Rational(97, 3725));
    CHECK(rep.ri_value == Rational(1) - Rational(97, 3725));
    CHECK(rep.hamming_value == Rational(97, 3750));
    REQUIRE(rep.erd_value.has_value());
    CHECK(*rep.erd_value == Rational(245017, 555025));
    REQUIRE(rep.ard_value.has_value());
    CHECK(*rep.ard_value == Rational(14453, 245017));
    REQUIRE(rep.ari_value.has_value());
    CHECK(*rep.ari_value == Rational(1) - Rational(14453, 245017));
    REQUIRE(rep.max_med_value.has_value());
    CHECK(*rep.max_med_value == Rational(2, 3));
    REQUIRE(rep.nmed_value.has_value());
    CHECK(*rep.nmed_value == Rational(3, 100));
    REQUIRE(rep.max_rd_value.has_value());
    REQUIRE(rep.nrd_value.has_value());
    CHECK(*rep.nrd_value == rep.rd_value / *rep.max_rd_value);
    CHECK(rep.notes.empty());
}

TEST_CASE("degenerate inputs are reported through notes, not exceptions") {
    const CriteriaReport rep = partdist::compute_criteria(ConfusionMatrix(1, 1, {5}));
    CHECK(rep.med_result.value == Rational(0));
    CHECK(rep.rd_value == Rational(0));
    CHECK(!rep.erd_value.has_value());
    CHECK(!rep.ard_value.has_value());
    CHECK(!rep.max_med_value.has_value());
    CHECK(!rep.nmed_value.has_value());
    CHECK(!rep.max_rd_value.has_value());
    CHECK(!rep.nrd_value.has_value());
    CHECK(has_note(rep, "ard undefined"));
    CHECK(has_note(rep, "single cluster"));
    CHECK(has_note(rep, "nrd undefined"));
}

TEST_CASE("independent-label studies honor the requested design") {
    const SamplerConfig cfg{2024, 5};
    const partdist::NullStudyResult res = partdist::null_case_study(2, 2, 50, 200, cfg, 1);
    CHECK(res.replicates == 200);
    CHECK(res.med.count() == 200);
    CHECK(res.rd.count() == 200);
    CHECK(res.ard.count() + res.ard_undefined == 200);
    REQUIRE(res.med.max_value().has_value());
    CHECK(*res.med.max_value() <= Rational(1, 2));
    REQUIRE(res.nmed.has_value());
    REQUIRE(res.nrd.has_value());
    CHECK(res.nmed->count() == 200);
    // NMED uses the fixed normalizer 1/2, so it is exactly 2 * MED here.
    CHECK(res.nmed->mean_exact() == res.med.mean_exact() * Rational(2));
    CHECK(res.reduced_label_draws <= 200);
}

TEST_CASE("worker count never changes a study's outcome") {
    const SamplerConfig cfg{77, 3};
    const partdist::NullStudyResult one = partdist::null_case_study(3, 2, 40, 700, cfg, 1);
    const partdist::NullStudyResult three = partdist::null_case_study(3, 2, 40, 700, cfg, 3);
    CHECK(one.med.histogram() == three.med.histogram());
    CHECK(one.rd.histogram() == three.rd.histogram());
    CHECK(one.ard.histogram() == three.ard.histogram());
    CHECK(one.ard.mean() == three.ard.mean());
    CHECK(one.ard.stddev() == three.ard.stddev());
    CHECK(one.ard_undefined == three.ard_undefined);
    CHECK(one.reduced_label_draws == three.reduced_label_draws);
}

TEST_CASE("exhaustive conditioning reproduces the known extremes") {
    const ConditionalTable tbl = partdist::conditional_given_med_exhaustive(2, 2, 20);
    CHECK(tbl.total() == 1691);
    CHECK(tbl.ard_undefined() == 0);
    CHECK(tbl.rd_max() == partdist::max_rd(2, 2, 20));
    CHECK(tbl.rd_max() == Rational(10, 19));
    CHECK(tbl.rd_max_witness().is_canonical());
    CHECK(partdist::rand_distance(partdist::pair_counts(tbl.rd_max_witness())) == Rational(10, 19));
    CHECK(tbl.ard_max() == Rational(95, 84));
    // First witness in enumeration order.
    CHECK(tbl.ard_max_witness().cells() == std::vector<long long>{0, 4, 4, 12});
    CHECK(tbl.ard_max_med() == Rational(2, 5));
    CHECK(tbl.ard_max_med() == partdist::med(tbl.ard_max_witness()).value);

    unsigned long long slice_total = 0;
    for (const auto& [key, sl] : tbl.slices()) {
        slice_total += sl.count;
        CHECK(key >= 0);
        CHECK(Rational(key, 20) <= partdist::max_med(2, 2, 20));
        unsigned long long hist_total = 0;
        for (const auto& [num, cnt] : sl.rd_hist) hist_total += cnt;
        CHECK(hist_total == sl.count);
    }
    CHECK(slice_total == 1691);

    CHECK(partdist::conditional_given_med_exhaustive(2, 2, 6).total() == 60);
}

TEST_CASE("exhaustive conditioning is worker-count invariant") {
    const ConditionalTable one = partdist::conditional_given_med_exhaustive(3, 3, 12, 100000, 1);
    const ConditionalTable four = partdist::conditional_given_med_exhaustive(3, 3, 12, 100000, 4);
    CHECK(one.total() == four.total());
    CHECK(one.rd_max() == four.rd_max());
    CHECK(one.rd_max_witness() == four.rd_max_witness());
    CHECK(one.ard_max() == four.ard_max());
    CHECK(one.ard_max_witness() == four.ard_max_witness());
    CHECK(one.ard_max_med() == four.ard_max_med());
    REQUIRE(one.slices().size() == four.slices().size());
    for (const auto& [key, sl] : one.slices()) {
        const auto it = four.slices().find(key);
        REQUIRE(it != four.slices().end());
        CHECK(sl.count == it->second.count);
        CHECK(sl.rd_hist == it->second.rd_hist);
        CHECK(sl.ard_defined == it->second.ard_defined);
    }
}

TEST_CASE("sampled conditioning replays exactly under one seed") {
    const SamplerConfig cfg{99, 1};
    const partdist::SampledConditionalResult a =
        partdist::conditional_given_med_sampled(3, 3, 30, 20000, cfg, 1);
    const partdist::SampledConditionalResult b =
        partdist::conditional_given_med_sampled(3, 3, 30, 20000, cfg, 2);
    CHECK(a.table.total() == 20000);
    CHECK(a.attempts >= 20000);
    CHECK(a.attempts == b.attempts);
    CHECK(a.table.rd_max() == b.table.rd_max());
    CHECK(a.table.rd_max_witness() == b.table.rd_max_witness());
    REQUIRE(a.table.slices().size() == b.table.slices().size());
    for (const auto& [key, sl] : a.table.slices()) {
        const auto it = b.table.slices().find(key);
        REQUIRE(it != b.table.slices().end());
        CHECK(sl.count == it->second.count);
    }
    // The sampled MED marginal is the per-slice count profile.
    const partdist::DistributionSummary marg = a.table.med_marginal();
    CHECK(marg.count() == 20000);
}

TEST_CASE("the standalone marginal agrees with the conditional table") {
    const partdist::DistributionSummary direct = partdist::med_marginal(2, 2, 20);
    const partdist::DistributionSummary via_table =
        partdist::conditional_given_med_exhaustive(2, 2, 20).med_marginal();
    CHECK(direct.count() == 1691);
    CHECK(direct.histogram() == via_table.histogram());
    CHECK(direct.mean_exact() == via_table.mean_exact());
    // The half-split MED maximum is attained inside this family.
    REQUIRE(direct.max_value().has_value());
    CHECK(*direct.max_value() == Rational(1, 2));
}

TEST_CASE("independence curve points carry values or skip notes") {
    const std::vector<partdist::IndependentCurvePoint> pts =
        partdist::nrd_independent_curve({{2, 2}, {1, 4}}, {20, 21});
    REQUIRE(pts.size() == 4);

    CHECK(pts[0].defined);
    CHECK(pts[0].nrd_value == Rational(1));
    CHECK(pts[0].independent_rd_value == partdist::independent_rd(2, 2, 20));
    CHECK(pts[0].max_rd_value == partdist::max_rd(2, 2, 20));

    CHECK(!pts[1].defined);
    CHECK(pts[1].note.find("not a multiple") != std::string::npos);

    CHECK(!pts[2].defined);
    CHECK(pts[2].note.find("closed-form domain") != std::string::npos);

    CHECK(!pts[3].defined);
}

TEST_CASE("the per-split 2x2 table is served unchanged to callers") {
    const std::vector<partdist::TwoByTwoRow> fig = partdist::two_by_two_figure(8);
    const std::vector<partdist::TwoByTwoRow> prof = partdist::two_by_two_profile(8);
    REQUIRE(fig.size() == prof.size());
    REQUIRE(fig.size() == 9);
    for (std::size_t i = 0; i < fig.size(); ++i) {
        CHECK(fig[i].d1 == prof[i].d1);
        CHECK(fig[i].med_value == prof[i].med_value);
        CHECK(fig[i].rd_value == prof[i].rd_value);
        CHECK(fig[i].ard_values == prof[i].ard_values);
    }
}
