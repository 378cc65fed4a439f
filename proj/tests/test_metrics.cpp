#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <partdist/labeling.hpp>
#include <partdist/metrics.hpp>
#include <partdist/rng.hpp>

using partdist::ConfusionMatrix;
using partdist::Labeling;
using partdist::PairCounts;
using partdist::Rational;

namespace {

const ConfusionMatrix kIris(3, 3, {50, 0, 0, 0, 48, 2, 0, 1, 49});
const ConfusionMatrix kModclust(5, 3,
                                {47, 197, 7, 0, 1408, 153, 0, 278, 1216, 0, 62, 0, 4813, 2, 0});
const ConfusionMatrix kEntmerge(5, 5, {16, 7,    0,  14, 214, 0,    146, 929, 417,
                                       69, 0,    1191, 81, 63, 159, 0,   0,   0,
                                       0,  62,   4809, 0,  0,  1,   5});
const ConfusionMatrix kSteinley(
    5, 5, {1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1});

ConfusionMatrix random_matrix(partdist::SplitStream& stream) {
    const int r = 1 + stream.index(5);
    const int s = 1 + stream.index(5);
    std::vector<long long> cells(static_cast<std::size_t>(r) * s, 0);
    for (auto& c : cells) c = static_cast<long long>(stream.below(7));
    cells[stream.below(cells.size())] += 2;  // pair criteria need at least two objects
    return ConfusionMatrix(r, s, std::move(cells));
}

}  // namespace

TEST_CASE("crosstab counts joint label frequencies") {
    const Labeling u = Labeling::from_tokens(std::vector<std::string>{"a", "a", "b", "b", "c"});
    const Labeling v = Labeling::from_tokens(std::vector<std::string>{"x", "y", "y", "y", "x"});
    const ConfusionMatrix m = ConfusionMatrix::crosstab(u, v);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(0, 1) == 1);
    CHECK(m.at(1, 1) == 2);
    CHECK(m.at(2, 0) == 1);
    CHECK(m.total() == 5);
}

TEST_CASE("pair counts split concordant and discordant pairs") {
    const PairCounts pc = partdist::pair_counts(kIris);
    CHECK(pc.a == 3530);
    CHECK(pc.b == 146);
    CHECK(pc.c == 145);
    CHECK(pc.d == 7354);
    CHECK(pc.b + pc.c == 291);
    CHECK(pc.pair_total() == 11175);
    CHECK(pc.a + pc.b + pc.c + pc.d == pc.pair_total());

    const PairCounts big = partdist::pair_counts(kModclust);
    CHECK(big.a == 13381757);
    CHECK(big.b == 1266044);
    CHECK(big.c == 574065);
    CHECK(big.d == 18254787);
}

TEST_CASE("rand distance on the reference matrices") {
    CHECK(partdist::rand_distance(kIris) == Rational(97, 3725));
    CHECK(partdist::rand_distance(kIris).to_decimal_string(3) == "0.026");
    CHECK(partdist::rand_index(kIris) == Rational(3628, 3725));
    CHECK(partdist::rand_distance(kSteinley) == Rational(22, 78));
    CHECK(partdist::rand_distance(kModclust) == Rational(1840109, 33476653));
    CHECK(partdist::rand_distance(kModclust).to_decimal_string(3) == "0.055");
    CHECK(partdist::rand_distance(kEntmerge) == Rational(1571550, 33476653));
    CHECK(partdist::rand_distance(kEntmerge).to_decimal_string(3) == "0.047");
}

TEST_CASE("chance-corrected distances on the reference matrices") {
    CHECK(partdist::expected_rd(kIris) == Rational(245017, 555025));
    CHECK(partdist::adjusted_rand_distance(kIris) == Rational(14453, 245017));
    CHECK(partdist::adjusted_rand_distance(kIris).to_decimal_string(3) == "0.059");
    CHECK(partdist::adjusted_rand_index(kIris) ==
          Rational(1) - Rational(14453, 245017));

    CHECK(partdist::expected_rd(kSteinley) == Rational(737, 3042));
    CHECK(partdist::adjusted_rand_distance(kSteinley) == Rational(78, 67));
    CHECK(partdist::adjusted_rand_distance(kSteinley).to_decimal_string(3) == "1.164");

    CHECK(partdist::adjusted_rand_distance(kModclust).to_decimal_string(3) == "0.112");
    CHECK(partdist::adjusted_rand_distance(kEntmerge).to_decimal_string(3) == "0.097");

    const ConfusionMatrix n1(2, 2, {16, 2, 2, 0});
    const ConfusionMatrix n2(2, 2, {11, 0, 4, 5});
    CHECK(partdist::rand_distance(n1) == Rational(32, 95));
    CHECK(partdist::rand_distance(n2) == Rational(32, 95));
    CHECK(partdist::adjusted_rand_distance(n1) == Rational(760, 693));
    CHECK(partdist::adjusted_rand_distance(n2) == Rational(1216, 1821));
}

TEST_CASE("adjustment is undefined when the chance term vanishes") {
    const ConfusionMatrix lump(1, 1, {5});
    CHECK(partdist::expected_rd(lump).is_zero());
    const ConfusionMatrix split(1, 2, {3, 4});
    CHECK(!partdist::expected_rd(split).is_zero());
}

TEST_CASE("empirical hamming identity holds everywhere") {
    partdist::SplitStream stream(partdist::SamplerConfig{2024, 1}, {1});
    for (int t = 0; t < 2000; ++t) {
        const ConfusionMatrix m = random_matrix(stream);
        const long long n = m.total();
        if (n < 2) continue;
        CHECK(partdist::rand_distance(m) ==
              Rational(n, n - 1) * partdist::hamming_empirical(m));
    }
    CHECK(partdist::hamming_empirical(kIris) == Rational(97, 3750));
}

TEST_CASE("pair criteria are invariant to relabeling and argument order") {
    partdist::SplitStream stream(partdist::SamplerConfig{2024, 2}, {2});
    for (int t = 0; t < 2000; ++t) {
        const ConfusionMatrix m = random_matrix(stream);

        // Relabeling one side permutes rows; swapping arguments transposes.
        std::vector<int> perm(m.rows());
        for (int i = 0; i < m.rows(); ++i) perm[i] = i;
        for (int i = m.rows() - 1; i > 0; --i)
            std::swap(perm[i], perm[stream.index(i + 1)]);
        std::vector<long long> cells(m.cells().size());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                cells[static_cast<std::size_t>(perm[i]) * m.cols() + j] = m.at(i, j);
        const ConfusionMatrix permuted(m.rows(), m.cols(), std::move(cells));
        const ConfusionMatrix flipped = m.transposed();

        CHECK(partdist::rand_distance(permuted) == partdist::rand_distance(m));
        CHECK(partdist::rand_distance(flipped) == partdist::rand_distance(m));
        CHECK(partdist::expected_rd(permuted) == partdist::expected_rd(m));
        CHECK(partdist::expected_rd(flipped) == partdist::expected_rd(m));
        if (!partdist::expected_rd(m).is_zero()) {
            CHECK(partdist::adjusted_rand_distance(permuted) ==
                  partdist::adjusted_rand_distance(m));
            CHECK(partdist::adjusted_rand_distance(flipped) ==
                  partdist::adjusted_rand_distance(m));
        }
    }
}
