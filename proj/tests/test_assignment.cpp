#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <partdist/assignment.hpp>
#include <partdist/combinatorics.hpp>
#include <partdist/labeling.hpp>
#include <partdist/rng.hpp>

using partdist::ConfusionMatrix;
using partdist::Labeling;
using partdist::MedResult;
using partdist::Rational;

namespace {

const ConfusionMatrix kSteinley(
    5, 5, {1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1});

ConfusionMatrix random_matrix(partdist::SplitStream& stream, int max_dim, int max_cell) {
    const int r = 1 + stream.index(max_dim);
    const int s = 1 + stream.index(max_dim);
    std::vector<long long> cells(static_cast<std::size_t>(r) * s, 0);
    for (auto& c : cells) c = static_cast<long long>(stream.below(max_cell + 1));
    cells[stream.below(cells.size())] += 1;
    return ConfusionMatrix(r, s, std::move(cells));
}

}  // namespace

TEST_CASE("misclassification distance on the reference matrices") {
    const ConfusionMatrix iris(3, 3, {50, 0, 0, 0, 48, 2, 0, 1, 49});
    CHECK(partdist::med(iris).value == Rational(1, 50));

    const MedResult steinley = partdist::med(kSteinley);
    CHECK(steinley.value == Rational(8, 13));
    CHECK(steinley.assignment.total_cost == 16);  // twice the relabeled objects

    const ConfusionMatrix modclust(
        5, 3, {47, 197, 7, 0, 1408, 153, 0, 278, 1216, 0, 62, 0, 4813, 2, 0});
    CHECK(partdist::med(modclust).value == Rational(746, 8183));

    const ConfusionMatrix entmerge(5, 5, {16, 7, 0, 14, 214, 0, 146, 929, 417, 69,
                                          0, 1191, 81, 63, 159, 0, 0, 0, 0, 62,
                                          4809, 0, 0, 1, 5});
    CHECK(partdist::med(entmerge).value == Rational(1040, 8183));
}

TEST_CASE("identity and independence endpoints") {
    const ConfusionMatrix diag(3, 3, {4, 0, 0, 0, 5, 0, 0, 0, 6});
    CHECK(partdist::med(diag).value == Rational(0));
    const ConfusionMatrix equal(2, 2, {5, 5, 5, 5});
    CHECK(partdist::med(equal).value == Rational(1, 2));
}

TEST_CASE("the identity matching is optimal for the near-diagonal example") {
    long long diag_sum = 0;
    for (int i = 0; i < 5; ++i) diag_sum += kSteinley.at(i, i);
    CHECK(Rational(kSteinley.total() - diag_sum, kSteinley.total()) ==
          partdist::med(kSteinley).value);
    // ... and so is the column rotation 4,5,1,2,3.
    const int cycle[5] = {3, 4, 0, 1, 2};
    long long cycle_sum = 0;
    for (int i = 0; i < 5; ++i) cycle_sum += kSteinley.at(i, cycle[i]);
    CHECK(Rational(kSteinley.total() - cycle_sum, kSteinley.total()) ==
          partdist::med(kSteinley).value);
}

TEST_CASE("assignment solver agrees with the factorial scan") {
    partdist::SplitStream stream(partdist::SamplerConfig{77, 0}, {3});
    for (int t = 0; t < 3000; ++t) {
        const ConfusionMatrix m = random_matrix(stream, 6, 6);
        CHECK(partdist::med(m).value == partdist::brute_force_med(m));
    }
}

TEST_CASE("distance is symmetric under transposition") {
    partdist::SplitStream stream(partdist::SamplerConfig{78, 0}, {4});
    for (int t = 0; t < 2000; ++t) {
        const ConfusionMatrix m = random_matrix(stream, 5, 8);
        CHECK(partdist::med(m).value == partdist::med(m.transposed()).value);
    }
}

TEST_CASE("agreement helper matches the solver") {
    partdist::SplitStream stream(partdist::SamplerConfig{79, 0}, {5});
    for (int t = 0; t < 1000; ++t) {
        const ConfusionMatrix m = random_matrix(stream, 5, 6);
        const long long agree =
            partdist::best_agreement_raw(m.rows(), m.cols(), m.cells().data());
        CHECK(Rational(m.total() - agree, m.total()) == partdist::med(m).value);
    }
}

TEST_CASE("triangle inequality over labeling triples") {
    partdist::SplitStream stream(partdist::SamplerConfig{80, 0}, {6});
    for (int t = 0; t < 300; ++t) {
        const long long n = 3 + static_cast<long long>(stream.below(40));
        const Labeling a = partdist::null_labels(n, 1 + stream.index(5), stream);
        const Labeling b = partdist::null_labels(n, 1 + stream.index(5), stream);
        const Labeling c = partdist::null_labels(n, 1 + stream.index(5), stream);
        const Rational ab = partdist::med(a, b).value;
        const Rational bc = partdist::med(b, c).value;
        const Rational ac = partdist::med(a, c).value;
        CHECK(ac <= ab + bc);
        CHECK(partdist::med(b, a).value == ab);
    }
}
