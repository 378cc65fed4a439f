#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <partdist/combinatorics.hpp>
#include <partdist/extremes.hpp>

using partdist::ConfusionMatrix;
using partdist::Rational;

TEST_CASE("largest misclassification distance in closed form") {
    CHECK(partdist::max_med(2, 2, 20) == Rational(1, 2));
    CHECK(partdist::max_med(2, 2, 21) == Rational(10, 21));
    CHECK(partdist::max_med(3, 3, 20) == Rational(13, 20));
    CHECK(partdist::max_med(2, 3, 20) == Rational(13, 20));  // driven by max(r, s)
    CHECK(partdist::max_med(2, 2, 100) == Rational(1, 2));
    CHECK(partdist::max_med(3, 3, 100) == Rational(33, 50));
    CHECK(partdist::max_med(4, 4, 100) == Rational(3, 4));
    CHECK(partdist::max_med(5, 5, 100) == Rational(4, 5));
    CHECK_THROWS_AS(partdist::max_med(1, 1, 5), std::domain_error);
    CHECK_THROWS_AS(partdist::max_med(3, 7, 5), std::domain_error);
}

TEST_CASE("normalized misclassification distance") {
    CHECK(partdist::nmed(ConfusionMatrix(2, 2, {6, 4, 4, 6})) == Rational(4, 5));
    CHECK(partdist::nmed(ConfusionMatrix(2, 2, {10, 0, 0, 10})) == Rational(0));
}

TEST_CASE("largest rand distance in closed form") {
    CHECK(partdist::max_rd(2, 2, 20) == Rational(10, 19));
    CHECK(partdist::max_rd(2, 2, 21) == Rational(11, 21));
    CHECK(partdist::max_rd(3, 3, 20) == Rational(61, 95));
    CHECK(partdist::max_rd(3, 2, 20) == partdist::max_rd(2, 3, 20));
    CHECK(partdist::max_rd(5, 5, 100) == Rational(151, 198));
    CHECK_THROWS_AS(partdist::max_rd(3, 3, 6), std::domain_error);
    CHECK_THROWS_AS(partdist::max_rd(1, 2, 10), std::domain_error);
}

TEST_CASE("rand-distance witnesses are canonical and attain the maximum") {
    const ConfusionMatrix w20 = partdist::argmax_rd_witness(2, 2, 20);
    CHECK(w20.to_string() == "[[10,9],[1,0]]");
    CHECK(partdist::rand_distance(w20) == partdist::max_rd(2, 2, 20));

    const ConfusionMatrix w100 = partdist::argmax_rd_witness(5, 5, 100);
    const long long expected_first[5] = {22, 19, 19, 18, 18};
    for (int j = 0; j < 5; ++j) CHECK(w100.at(0, j) == expected_first[j]);
    CHECK(w100.is_canonical());
    CHECK(partdist::rand_distance(w100) == partdist::max_rd(5, 5, 100));

    for (int r = 2; r <= 4; ++r)
        for (int s = r; s <= 5; ++s)
            for (long long n = 2 * (r - 1) + s; n <= 2 * (r - 1) + s + 20; ++n) {
                const ConfusionMatrix w = partdist::argmax_rd_witness(r, s, n);
                CHECK(w.is_canonical());
                CHECK(partdist::rand_distance(w) == partdist::max_rd(r, s, n));
                CHECK(partdist::is_rd_witness_shape(r, s, w.cells().data()));
            }
}

TEST_CASE("normalized rand distance") {
    const ConfusionMatrix w = partdist::argmax_rd_witness(2, 2, 20);
    CHECK(partdist::nrd(w) == Rational(1));
    CHECK(partdist::nrd(ConfusionMatrix(2, 2, {10, 0, 0, 10})) == Rational(0));
}

TEST_CASE("independence values need rs to divide n") {
    CHECK(partdist::independent_rd(2, 2, 20) == Rational(10, 19));
    CHECK(partdist::independent_rd(5, 5, 100) == Rational(32, 99));
    CHECK(partdist::independent_ard(2, 3, 24) == Rational(69, 65));
    CHECK(partdist::independent_ard(3, 3, 27) == Rational(13, 12));
    CHECK(partdist::independent_ard(2, 3, 24).to_decimal_string(3) == "1.062");
    CHECK(partdist::independent_ard(3, 3, 27).to_decimal_string(3) == "1.083");
    CHECK_THROWS_AS(partdist::independent_rd(2, 3, 20), std::invalid_argument);
    CHECK_THROWS_AS(partdist::independent_ard(3, 3, 20), std::invalid_argument);

    // Only the two-by-two shape reaches the full range at independence.
    CHECK(partdist::independent_rd(2, 2, 20) / partdist::max_rd(2, 2, 20) == Rational(1));
    CHECK(partdist::independent_rd(5, 5, 100) / partdist::max_rd(5, 5, 100) ==
          Rational(64, 151));
    CHECK((partdist::independent_rd(5, 5, 100) / partdist::max_rd(5, 5, 100))
              .to_decimal_string(2) == "0.42");
}

TEST_CASE("two-cluster profile by diagonal split") {
    const auto profile = partdist::two_by_two_profile(20);
    bool saw_d16 = false;
    for (const partdist::TwoByTwoRow& row : profile) {
        if (row.d1 != 16) continue;
        saw_d16 = true;
        CHECK(row.med_value == Rational(1, 5));
        CHECK(row.rd_value == Rational(32, 95));
        bool high = false, low = false;
        for (const Rational& a : row.ard_values) {
            if (a == Rational(760, 693)) high = true;
            if (a == Rational(1216, 1821)) low = true;
        }
        CHECK(high);
        CHECK(low);
    }
    CHECK(saw_d16);

    // Slices are symmetric: d1 and n - d1 carry the same criterion values.
    for (const partdist::TwoByTwoRow& row : profile) {
        for (const partdist::TwoByTwoRow& other : profile) {
            if (other.d1 != 20 - row.d1) continue;
            CHECK(row.med_value == other.med_value);
            CHECK(row.rd_value == other.rd_value);
            CHECK(row.ard_values == other.ard_values);
        }
    }
}

TEST_CASE("two-cluster adjusted maximum and its witness") {
    const partdist::TwoByTwoArdMax am = partdist::two_by_two_ard_max(20);
    CHECK(am.value == Rational(95, 84));
    CHECK(am.d1 == 12);
    CHECK(am.witness.to_string() == "[[12,4],[4,0]]");
    CHECK(partdist::adjusted_rand_distance(am.witness) == Rational(95, 84));

    // The margin scan reproduces the full profile's global maximum, witness
    // included; n = 4 and n = 6 are where balanced tables beat arrowheads.
    for (long long n : {4LL, 6LL, 9LL, 13LL, 20LL, 24LL}) {
        const partdist::TwoByTwoArdMax best = partdist::two_by_two_ard_max(n);
        Rational table_best(0);
        for (const partdist::TwoByTwoRow& row : partdist::two_by_two_profile(n))
            for (const Rational& a : row.ard_values)
                if (table_best < a) table_best = a;
        CHECK(best.value == table_best);
        CHECK(partdist::adjusted_rand_distance(best.witness) == best.value);
    }
}

TEST_CASE("closed-form slice maximizer") {
    CHECK(partdist::alpha_n(20, 12) == Rational(95, 84));
    CHECK(partdist::alpha_n(20, 16) == Rational(760, 693));
    CHECK_THROWS_AS(partdist::alpha_n(20, 19), std::domain_error);  // d2 = 1 case
    CHECK_THROWS_AS(partdist::alpha_n(20, 3), std::domain_error);   // d1 < d2
}

TEST_CASE("first-order approximation near identical partitions") {
    CHECK(partdist::taylor_rd_small(100, 6, 4) == Rational(20, 99));
    CHECK(partdist::taylor_rd_small(100, 6, 4).to_decimal_string(3) == "0.202");
    CHECK(partdist::rand_distance(ConfusionMatrix(2, 2, {55, 6, 4, 35})) ==
          Rational(2, 11));
    CHECK(Rational(2, 11).to_decimal_string(3) == "0.182");
    const Rational tiny_exact =
        partdist::rand_distance(ConfusionMatrix(2, 2, {990, 1, 1, 8}));
    const Rational tiny_approx = partdist::taylor_rd_small(1000, 1, 1);
    CHECK(tiny_exact == Rational(499, 124875));
    // Off-diagonal mass of two relabelings out of 1000: the approximation is
    // within a tenth of a percent of the exact value in absolute terms.
    CHECK((tiny_approx - tiny_exact < Rational(1, 1000)));
    CHECK((tiny_exact - tiny_approx < Rational(1, 1000)));
}

TEST_CASE("maximizer shape predicates") {
    const long long witness[4] = {10, 9, 1, 0};
    CHECK(partdist::is_rd_witness_shape(2, 2, witness));
    const long long not_witness[4] = {9, 10, 1, 0};  // first row must not increase
    CHECK(!partdist::is_rd_witness_shape(2, 2, not_witness));

    const long long arrow[9] = {10, 3, 2, 3, 0, 0, 2, 0, 0};
    CHECK(partdist::is_ard_arrowhead_shape(3, 3, arrow));
    const long long no_arrow[9] = {10, 3, 2, 3, 1, 0, 2, 0, 0};  // inner block occupied
    CHECK(!partdist::is_ard_arrowhead_shape(3, 3, no_arrow));
}

TEST_CASE("exhaustive maximizer check on small families") {
    const partdist::ConjectureReport small = partdist::verify_maximizer_conjectures(2, 2, 20);
    CHECK(small.family_size == 1691);
    CHECK(small.rd_max == Rational(10, 19));
    CHECK(small.rd_matches_formula);
    CHECK(small.rd_witness_attains);
    CHECK(small.ard_max == Rational(95, 84));
    CHECK(small.ard_undefined == 0);
    CHECK(small.ok());

    const partdist::ConjectureReport rect = partdist::verify_maximizer_conjectures(2, 3, 12);
    CHECK(rect.rd_matches_formula);
    CHECK(rect.ard_max == Rational(418, 355));
    CHECK(rect.ok());
}

TEST_CASE("the misclassification bound may be strict on the positive-margin family") {
    // The ceiling bound always holds, but at a handful of tight shapes no
    // positive-margin matrix reaches it; the first is the 2x2 family on two
    // objects, where both members have distance zero.
    long long best_agree_min = 0;  // max distance = 1 - (min over family of best agreement)/n
    partdist::enumerate_confusion_matrices(2, 2, 2, [&](const long long* cells) {
        const long long agree = std::max(cells[0] + cells[3], cells[1] + cells[2]);
        if (best_agree_min == 0 || agree < best_agree_min) best_agree_min = agree;
    });
    CHECK(Rational(2 - best_agree_min, 2) == Rational(0));
    CHECK(partdist::max_med(2, 2, 2) == Rational(1, 2));  // the bound itself

    // On a roomier family the bound is attained.
    long long best = 4;
    partdist::enumerate_confusion_matrices(2, 2, 4, [&](const long long* cells) {
        const long long agree = std::max(cells[0] + cells[3], cells[1] + cells[2]);
        if (agree < best) best = agree;
    });
    CHECK(Rational(4 - best, 4) == partdist::max_med(2, 2, 4));
}
