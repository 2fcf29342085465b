#include <doctest.h>

#include <cmath>

#include "bonnc/noise.hpp"
#include "bonnc/rng.hpp"

using namespace bonnc;

namespace {

LabelState all_labelled(int n, int c, uint64_t seed) {
    LabelState ls(n, c);
    Rng rng(seed);
    for (int v = 0; v < n; ++v) {
        ls.label[v] = rng.uniform_int(c);
        ls.status[v] = NodeStatus::Original;
    }
    return ls;
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("transition matrix forms") {
    // p = 0 is the identity for both kinds
    for (NoiseKind kind : {NoiseKind::Uniform, NoiseKind::Pair}) {
        const NoiseSpec spec = build_transition(kind, 0.0, 3);
        CHECK(spec.q == Matrix::identity(3));
    }

    const NoiseSpec uni = build_transition(NoiseKind::Uniform, 0.6, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(uni.q(i, j) == doctest::Approx(i == j ? 0.4 : 0.2).epsilon(1e-15));

    const NoiseSpec pair = build_transition(NoiseKind::Pair, 0.4, 3);
    const Matrix expect = Matrix::from_rows({{0.6, 0.4, 0.0}, {0.0, 0.6, 0.4}, {0.4, 0.0, 0.6}});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(pair.q(i, j) == doctest::Approx(expect(i, j)).epsilon(1e-15));

    CHECK_THROWS_AS(build_transition(NoiseKind::Uniform, 0.1, 1), ValidationError);
    CHECK_THROWS_AS(build_transition(NoiseKind::Uniform, 1.5, 3), ValidationError);
}

TEST_CASE("rows sum to one for every kind, rate and class count") {
    for (NoiseKind kind : {NoiseKind::Uniform, NoiseKind::Pair})
        for (double p : {0.0, 0.2, 0.4, 0.6, 1.0})
            for (int c : {2, 3, 5, 7}) {
                const NoiseSpec spec = build_transition(kind, p, c);
                for (int i = 0; i < c; ++i) {
                    double sum = 0.0;
                    for (int j = 0; j < c; ++j) sum += spec.q(i, j);
                    CHECK(std::abs(sum - 1.0) < 1e-12);
                }
            }
}

TEST_CASE("pair map override") {
    const NoiseSpec spec = build_transition(NoiseKind::Pair, 0.3, 3, {2, 0, 1});
    CHECK(spec.q(0, 2) == doctest::Approx(0.3));
    CHECK(spec.q(1, 0) == doctest::Approx(0.3));
    CHECK(spec.q(0, 1) == 0.0);
    CHECK_THROWS_AS(build_transition(NoiseKind::Pair, 0.3, 3, {0, 1, 2}), ValidationError);
    CHECK_THROWS_AS(build_transition(NoiseKind::Pair, 0.3, 3, {2, 0}), ValidationError);
    CHECK_THROWS_AS(build_transition(NoiseKind::Uniform, 0.3, 3, {2, 0, 1}), ValidationError);
}

TEST_CASE("zero rate leaves labels unchanged") {
    const LabelState ls = all_labelled(50, 3, 1);
    std::vector<int> mask;
    for (int v = 0; v < 50; ++v) mask.push_back(v);
    const auto [noisy, record] = corrupt(ls, mask, build_transition(NoiseKind::Uniform, 0.0, 3), 5);
    CHECK(noisy == ls);
    for (size_t i = 0; i < record.node.size(); ++i) CHECK(!record.flipped(i));
}

TEST_CASE("empirical flip rate follows the binomial") {
    const int n = 10000;
    const double p = 0.4;
    const LabelState ls = all_labelled(n, 4, 2);
    std::vector<int> mask;
    for (int v = 0; v < n; ++v) mask.push_back(v);

    const auto [noisy, record] = corrupt(ls, mask, build_transition(NoiseKind::Uniform, p, 4), 17);
    int flips = 0;
    for (size_t i = 0; i < record.node.size(); ++i)
        if (record.flipped(i)) ++flips;
    const double sigma = std::sqrt(n * p * (1.0 - p));
    CHECK(std::abs(flips - n * p) < 3.0 * sigma);
}

TEST_CASE("pair noise flips only to the pair class") {
    const int n = 2000;
    const LabelState ls = all_labelled(n, 5, 3);
    std::vector<int> mask;
    for (int v = 0; v < n; ++v) mask.push_back(v);
    const auto [noisy, record] = corrupt(ls, mask, build_transition(NoiseKind::Pair, 0.4, 5), 23);
    int flips = 0;
    for (size_t i = 0; i < record.node.size(); ++i) {
        if (!record.flipped(i)) continue;
        ++flips;
        CHECK(record.noisy_label[i] == (record.clean_label[i] + 1) % 5);
    }
    CHECK(flips > 0);
}

TEST_CASE("nodes outside the mask are untouched and corruption is seed-deterministic") {
    const LabelState ls = all_labelled(100, 3, 4);
    std::vector<int> mask;
    for (int v = 0; v < 50; ++v) mask.push_back(v);
    const NoiseSpec spec = build_transition(NoiseKind::Uniform, 0.8, 3);

    const auto [a, ra] = corrupt(ls, mask, spec, 7);
    const auto [b, rb] = corrupt(ls, mask, spec, 7);
    CHECK(a == b);

    for (int v = 50; v < 100; ++v) {
        CHECK(a.label[v] == ls.label[v]);
        CHECK(a.status[v] == ls.status[v]);
    }

    const auto [c, rc] = corrupt(ls, mask, spec, 8);
    CHECK(c.label != a.label);  // overwhelmingly likely at rate 0.8 over 50 nodes
}

TEST_CASE("corrupt validates the mask") {
    LabelState ls(10, 3);  // all unlabelled
    CHECK_THROWS_AS(corrupt(ls, {0}, build_transition(NoiseKind::Uniform, 0.5, 3), 1), ValidationError);
}

}  // TEST_SUITE
