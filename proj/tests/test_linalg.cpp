#include <doctest.h>

#include <cmath>

#include "bonnc/gcn_grad.hpp"
#include "bonnc/graph.hpp"
#include "bonnc/linalg.hpp"
#include "bonnc/rng.hpp"
#include "oracles.hpp"

using namespace bonnc;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-scale, scale);
    return m;
}

SparseAdjacency random_symmetric(int n, double density, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < density) edges.push_back({i, j});
    return SparseAdjacency::from_undirected_edges(n, edges);
}

/// 6-node, d=4, h=3, c=2 instance used by the gradient checks.
struct TinyInstance {
    Graph graph;
    Matrix w0, w1, target;
    std::vector<int> mask;

    explicit TinyInstance(uint64_t seed) {
        Rng rng(seed);
        graph.n = 6;
        graph.d = 4;
        graph.a = SparseAdjacency::from_undirected_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {1, 4}});
        graph.a_hat = normalize_adjacency(graph.a);
        graph.x = random_matrix(6, 4, rng);
        w0 = random_matrix(4, 3, rng);
        w1 = random_matrix(3, 2, rng);
        target = row_softmax(random_matrix(6, 2, rng));
        mask = {0, 2, 3, 5};
    }

    GcnProblem problem() const {
        GcnProblem p;
        p.a_hat = &graph.a_hat;
        p.x = &graph.x;
        return p;
    }
};

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("matmul identity, hand product and zero") {
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(matmul(Matrix::identity(2), m) == m);

    const Matrix v = Matrix::from_rows({{0}, {1}});
    const Matrix prod = matmul(m, v);
    CHECK(prod(0, 0) == doctest::Approx(2.0));
    CHECK(prod(1, 0) == doctest::Approx(4.0));

    const Matrix zero(2, 2);
    CHECK(matmul(zero, m) == zero);

    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST_CASE("spmm identity and hand computation") {
    const Matrix m = Matrix::from_rows({{2}, {4}});
    CHECK(spmm(SparseAdjacency::identity(2), m) == m);

    // 2-node complete normalized adjacency: all entries 0.5
    const auto a_hat = normalize_adjacency(SparseAdjacency::from_undirected_edges(2, {{0, 1}}));
    const Matrix out = spmm(a_hat, m);
    CHECK(out(0, 0) == doctest::Approx(3.0));
    CHECK(out(1, 0) == doctest::Approx(3.0));

    CHECK_THROWS_AS(spmm(SparseAdjacency::identity(3), Matrix(2, 2)), DimensionError);
}

TEST_CASE("spmm equals densified matmul on random instances") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(derive_seed(seed, 77));
        const auto adj = random_symmetric(8, 0.4, rng);
        const Matrix m = random_matrix(8, 5, rng);
        const Matrix sparse = spmm(adj, m);
        const Matrix dense = matmul(to_dense(adj), m);
        for (size_t i = 0; i < sparse.size(); ++i)
            CHECK(std::abs(sparse.data()[i] - dense.data()[i]) < 1e-12);
    }
}

TEST_CASE("row_softmax symmetry, shift invariance and derived value") {
    const Matrix flat = row_softmax(Matrix::from_rows({{0.0, 0.0}}));
    CHECK(flat(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    const Matrix big = row_softmax(Matrix::from_rows({{1000.0, 1000.0}}));
    CHECK(all_finite(big));
    CHECK(big(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // exp-normalize of (0.2, 0.8)
    const Matrix p = row_softmax(Matrix::from_rows({{0.2, 0.8}}));
    const double e0 = std::exp(0.2), e1 = std::exp(0.8);
    CHECK(p(0, 0) == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));
    CHECK(p(0, 0) == doctest::Approx(0.3543).epsilon(1e-4));
    CHECK(p(0, 1) == doctest::Approx(0.6457).epsilon(1e-4));
}

TEST_CASE("row_softmax rows sum to one and shifting a row changes nothing") {
    Rng rng(3);
    Matrix m = random_matrix(7, 5, rng, 3.0);
    const Matrix p = row_softmax(m);
    for (int i = 0; i < p.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < p.cols(); ++j) sum += p(i, j);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
    Matrix shifted = m;
    for (int j = 0; j < m.cols(); ++j) shifted(2, j) += 17.0;
    const Matrix p2 = row_softmax(shifted);
    for (int j = 0; j < m.cols(); ++j) CHECK(p2(2, j) == doctest::Approx(p(2, j)).epsilon(1e-12));
}

TEST_CASE("cross entropy analytic values") {
    const Matrix onehot = Matrix::from_rows({{1.0, 0.0}});
    CHECK(masked_cross_entropy(onehot, onehot, {0}) <= 1e-11);

    const Matrix uniform = Matrix::from_rows({{0.25, 0.25, 0.25, 0.25}});
    const Matrix target = Matrix::from_rows({{0.0, 1.0, 0.0, 0.0}});
    CHECK(masked_cross_entropy(uniform, target, {0}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const Matrix pred = Matrix::from_rows({{0.25, 0.75}});
    const Matrix t2 = Matrix::from_rows({{0.0, 1.0}});
    CHECK(masked_cross_entropy(pred, t2, {0}) == doctest::Approx(-std::log(0.75)).epsilon(1e-12));

    CHECK_THROWS_AS(masked_cross_entropy(pred, t2, {}), ArgumentError);
}

TEST_CASE("gradients match central finite differences") {
    const TinyInstance inst(41);
    const GcnProblem prob = inst.problem();
    const GcnLossGrad grad = gcn_loss_grad(prob, inst.w0, inst.w1, inst.target, inst.mask);

    Matrix w0 = inst.w0, w1 = inst.w1;
    const auto loss_of = [&]() {
        GcnProblem p = prob;
        const GcnActivations act = gcn_forward(p, w0, w1);
        return masked_cross_entropy(act.p, inst.target, inst.mask);
    };
    const Matrix fd0 = oracle::fd_grad(loss_of, w0, 1e-5);
    const Matrix fd1 = oracle::fd_grad(loss_of, w1, 1e-5);
    CHECK(oracle::rel_error(grad.grad_w0, fd0) < 1e-6);
    CHECK(oracle::rel_error(grad.grad_w1, fd1) < 1e-6);
}

TEST_CASE("zero tangents in, zero grad tangents out") {
    const TinyInstance inst(42);
    Dual w0(inst.w0), w1(inst.w1), target(inst.target);
    w0.reset_tangents(2);
    w1.reset_tangents(2);
    target.reset_tangents(2);
    const GcnGradResult res = grad_and_tangents(inst.problem(), w0, w1, target, inst.mask);
    for (int d = 0; d < 2; ++d) {
        CHECK(res.loss_tangents[d] == 0.0);
        for (double v : res.grad_w0_tangents[d].data()) CHECK(v == 0.0);
        for (double v : res.grad_w1_tangents[d].data()) CHECK(v == 0.0);
    }
}

TEST_CASE("grad tangents match finite differences of the gradients") {
    const TinyInstance inst(43);
    Rng rng(99);

    Dual w0(inst.w0), w1(inst.w1), target(inst.target);
    w0.tangents = {random_matrix(4, 3, rng)};
    w1.tangents = {random_matrix(3, 2, rng)};
    target.tangents = {random_matrix(6, 2, rng, 0.1)};

    const GcnGradResult res = grad_and_tangents(inst.problem(), w0, w1, target, inst.mask);

    // perturb all inputs along the direction and difference the gradients
    const double h = 1e-5;
    const auto grads_at = [&](double off) {
        GcnProblem p = inst.problem();
        const Matrix pw0 = inst.w0 + w0.tangents[0] * off;
        const Matrix pw1 = inst.w1 + w1.tangents[0] * off;
        const Matrix pt = inst.target + target.tangents[0] * off;
        return gcn_loss_grad(p, pw0, pw1, pt, inst.mask);
    };
    const GcnLossGrad up = grads_at(h);
    const GcnLossGrad down = grads_at(-h);
    const Matrix fd_g0 = (up.grad_w0 - down.grad_w0) * (1.0 / (2.0 * h));
    const Matrix fd_g1 = (up.grad_w1 - down.grad_w1) * (1.0 / (2.0 * h));

    CHECK(oracle::rel_error(res.grad_w0_tangents[0], fd_g0) < 1e-5);
    CHECK(oracle::rel_error(res.grad_w1_tangents[0], fd_g1) < 1e-5);

    const double fd_loss = (up.loss - down.loss) / (2.0 * h);
    CHECK(res.loss_tangents[0] == doctest::Approx(fd_loss).epsilon(1e-5));
}

TEST_CASE("tangent propagation is linear in the seed") {
    const TinyInstance inst(44);
    Rng rng(7);
    const double alpha = 3.5;

    Dual w0(inst.w0), w1(inst.w1), target(inst.target);
    w0.tangents = {random_matrix(4, 3, rng)};
    w1.tangents = {random_matrix(3, 2, rng)};
    target.tangents = {random_matrix(6, 2, rng)};
    const GcnGradResult base = grad_and_tangents(inst.problem(), w0, w1, target, inst.mask);

    Dual sw0 = w0, sw1 = w1, st = target;
    sw0.tangents[0] *= alpha;
    sw1.tangents[0] *= alpha;
    st.tangents[0] *= alpha;
    const GcnGradResult scaled = grad_and_tangents(inst.problem(), sw0, sw1, st, inst.mask);

    for (size_t i = 0; i < base.grad_w0_tangents[0].size(); ++i)
        CHECK(std::abs(scaled.grad_w0_tangents[0].data()[i] - alpha * base.grad_w0_tangents[0].data()[i]) < 1e-12);
    for (size_t i = 0; i < base.grad_w1_tangents[0].size(); ++i)
        CHECK(std::abs(scaled.grad_w1_tangents[0].data()[i] - alpha * base.grad_w1_tangents[0].data()[i]) < 1e-12);
}

TEST_CASE("identical inputs give bit-identical results") {
    const TinyInstance inst(45);
    const GcnLossGrad a = gcn_loss_grad(inst.problem(), inst.w0, inst.w1, inst.target, inst.mask);
    const GcnLossGrad b = gcn_loss_grad(inst.problem(), inst.w0, inst.w1, inst.target, inst.mask);
    CHECK(a.loss == b.loss);
    CHECK(a.grad_w0 == b.grad_w0);
    CHECK(a.grad_w1 == b.grad_w1);
}

TEST_CASE("non-finite intermediates name the failing stage") {
    TinyInstance inst(46);
    inst.w0(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(gcn_loss_grad(inst.problem(), inst.w0, inst.w1, inst.target, inst.mask),
                         doctest::Contains("hidden pre-activation"), NumericError);
}

}  // TEST_SUITE
