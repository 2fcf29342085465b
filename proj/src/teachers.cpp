#include "bonnc/teachers.hpp"

#include <algorithm>
#include <cmath>

#include "bonnc/rng.hpp"

namespace bonnc {

namespace {

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

Matrix glorot_matrix(int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    return m;
}

Matrix relu(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Gram-Schmidt over the columns; degenerate columns are replaced by fresh
/// normalized draws.
Matrix orthonormal_columns(int rows, int cols, Rng& rng) {
    Matrix g = gaussian_matrix(rows, cols, rng);
    for (int j = 0; j < cols; ++j) {
        for (int prev = 0; prev < j && prev < rows; ++prev) {
            double proj = 0.0;
            for (int i = 0; i < rows; ++i) proj += g(i, j) * g(i, prev);
            for (int i = 0; i < rows; ++i) g(i, j) -= proj * g(i, prev);
        }
        double norm = 0.0;
        for (int i = 0; i < rows; ++i) norm += g(i, j) * g(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-10) {
            for (int i = 0; i < rows; ++i) g(i, j) = rng.normal();
            --j;
            continue;
        }
        for (int i = 0; i < rows; ++i) g(i, j) /= norm;
    }
    return g;
}

}  // namespace

void PropagationEncoder::fit(const Graph& g, uint64_t seed) {
    if (identity_) {
        if (out_dim_ != g.d)
            throw ValidationError("PropagationEncoder: identity projection needs out_dim == d");
        projection_ = Matrix::identity(g.d);
        return;
    }
    Rng rng(derive_seed(seed, 0xE1));
    projection_ = orthonormal_columns(g.d, out_dim_, rng);
}

Matrix PropagationEncoder::embed(const Graph& g) const {
    if (projection_.empty()) throw ValidationError("PropagationEncoder: embed before fit");
    return matmul(spmm(g.a_hat, spmm(g.a_hat, g.x)), projection_);
}

void ContrastiveEncoder::fit(const Graph& g, uint64_t seed) {
    Rng rng(derive_seed(seed, 0xE2));
    weight_ = glorot_matrix(g.d, out_dim_, rng);
    Matrix disc = glorot_matrix(out_dim_, out_dim_, rng);
    loss_curve_.clear();

    const Matrix u = spmm(g.a_hat, g.x);
    const double inv_2n = 1.0 / (2.0 * g.n);

    std::vector<int> perm(g.n);
    for (int i = 0; i < g.n; ++i) perm[i] = i;

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        rng.shuffle(perm);
        Matrix x_corrupt(g.n, g.d);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.d; ++j) x_corrupt(i, j) = g.x(perm[i], j);
        const Matrix u_corrupt = spmm(g.a_hat, x_corrupt);

        const Matrix s_pos = matmul(u, weight_);
        const Matrix s_neg = matmul(u_corrupt, weight_);
        const Matrix h_pos = relu(s_pos);
        const Matrix h_neg = relu(s_neg);

        // summary readout, treated as constant for the step
        std::vector<double> summary(out_dim_);
        for (int j = 0; j < out_dim_; ++j) {
            double acc = 0.0;
            for (int i = 0; i < g.n; ++i) acc += h_pos(i, j);
            summary[j] = sigmoid(acc / g.n);
        }
        std::vector<double> query(out_dim_, 0.0);
        for (int a = 0; a < out_dim_; ++a)
            for (int b = 0; b < out_dim_; ++b) query[a] += disc(a, b) * summary[b];

        double loss = 0.0;
        Matrix dh_pos(g.n, out_dim_), dh_neg(g.n, out_dim_);
        std::vector<double> dquery(out_dim_, 0.0);
        for (int i = 0; i < g.n; ++i) {
            double pos = 0.0, neg = 0.0;
            for (int j = 0; j < out_dim_; ++j) {
                pos += h_pos(i, j) * query[j];
                neg += h_neg(i, j) * query[j];
            }
            loss += (softplus(-pos) + softplus(neg)) * inv_2n;
            const double dpos = (sigmoid(pos) - 1.0) * inv_2n;
            const double dneg = sigmoid(neg) * inv_2n;
            for (int j = 0; j < out_dim_; ++j) {
                dh_pos(i, j) = dpos * query[j];
                dh_neg(i, j) = dneg * query[j];
                dquery[j] += dpos * h_pos(i, j) + dneg * h_neg(i, j);
            }
        }
        loss_curve_.push_back(loss);

        Matrix ddisc(out_dim_, out_dim_);
        for (int a = 0; a < out_dim_; ++a)
            for (int b = 0; b < out_dim_; ++b) ddisc(a, b) = dquery[a] * summary[b];

        for (size_t i = 0; i < dh_pos.size(); ++i) {
            dh_pos.data()[i] *= s_pos.data()[i] > 0.0 ? 1.0 : 0.0;
            dh_neg.data()[i] *= s_neg.data()[i] > 0.0 ? 1.0 : 0.0;
        }
        Matrix dweight = matmul(transpose(u), dh_pos);
        dweight += matmul(transpose(u_corrupt), dh_neg);

        weight_ -= dweight * cfg_.lr;
        disc -= ddisc * cfg_.lr;
    }
}

Matrix ContrastiveEncoder::embed(const Graph& g) const {
    if (weight_.empty()) throw ValidationError("ContrastiveEncoder: embed before fit");
    return relu(matmul(spmm(g.a_hat, g.x), weight_));
}

void ReconstructionEncoder::fit(const Graph& g, uint64_t seed) {
    Rng rng(derive_seed(seed, 0xE3));
    weight_ = glorot_matrix(g.d, out_dim_, rng);
    loss_curve_.clear();

    // undirected edge list (i < j)
    std::vector<std::pair<int, int>> edges;
    const auto& offs = g.a.row_offsets();
    for (int i = 0; i < g.n; ++i)
        for (int e = offs[i]; e < offs[i + 1]; ++e)
            if (i < g.a.col_indices()[e]) edges.push_back({i, g.a.col_indices()[e]});
    if (edges.empty()) return;  // nothing to reconstruct

    const Matrix u = spmm(g.a_hat, g.x);
    const int samples = std::min<int>(static_cast<int>(edges.size()), 4 * g.n);
    const double inv_2m = 1.0 / (2.0 * samples);

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        const Matrix s = matmul(u, weight_);
        const Matrix h = relu(s);

        double loss = 0.0;
        Matrix dh(g.n, out_dim_);
        for (int m = 0; m < samples; ++m) {
            const auto [pi, pj] = edges[rng.uniform_int(static_cast<int>(edges.size()))];
            int ni = rng.uniform_int(g.n), nj = rng.uniform_int(g.n);
            while (ni == nj || g.a.has_entry(ni, nj)) {
                ni = rng.uniform_int(g.n);
                nj = rng.uniform_int(g.n);
            }
            double zp = 0.0, zn = 0.0;
            for (int j = 0; j < out_dim_; ++j) {
                zp += h(pi, j) * h(pj, j);
                zn += h(ni, j) * h(nj, j);
            }
            loss += (softplus(-zp) + softplus(zn)) * inv_2m;
            const double dzp = (sigmoid(zp) - 1.0) * inv_2m;
            const double dzn = sigmoid(zn) * inv_2m;
            for (int j = 0; j < out_dim_; ++j) {
                dh(pi, j) += dzp * h(pj, j);
                dh(pj, j) += dzp * h(pi, j);
                dh(ni, j) += dzn * h(nj, j);
                dh(nj, j) += dzn * h(ni, j);
            }
        }
        loss_curve_.push_back(loss);

        for (size_t i = 0; i < dh.size(); ++i) dh.data()[i] *= s.data()[i] > 0.0 ? 1.0 : 0.0;
        const Matrix dweight = matmul(transpose(u), dh);
        weight_ -= dweight * cfg_.lr;
    }
}

Matrix ReconstructionEncoder::embed(const Graph& g) const {
    if (weight_.empty()) throw ValidationError("ReconstructionEncoder: embed before fit");
    return relu(matmul(spmm(g.a_hat, g.x), weight_));
}

namespace {

/// Salts the fit seed so each built-in encoder draws from its own stream.
template <typename E>
class SaltedEncoder : public E {
public:
    template <typename... Args>
    SaltedEncoder(uint64_t salt, Args&&... args) : E(std::forward<Args>(args)...), salt_(salt) {}

    void fit(const Graph& g, uint64_t seed) override { E::fit(g, derive_seed(salt_, seed)); }

private:
    uint64_t salt_;
};

}  // namespace

std::vector<std::unique_ptr<TeacherEncoder>> builtin_encoders(int embed_dim, uint64_t seed,
                                                              const EncoderConfig& cfg) {
    std::vector<std::unique_ptr<TeacherEncoder>> out;
    out.push_back(std::make_unique<SaltedEncoder<PropagationEncoder>>(derive_seed(seed, 11), embed_dim));
    out.push_back(std::make_unique<SaltedEncoder<ContrastiveEncoder>>(derive_seed(seed, 12), embed_dim, cfg));
    out.push_back(std::make_unique<SaltedEncoder<ReconstructionEncoder>>(derive_seed(seed, 13), embed_dim, cfg));
    return out;
}

ClassifierGrad classifier_loss_grad(const Matrix& h, const Matrix& w, const Matrix& target,
                                    const std::vector<int>& mask) {
    if (h.cols() != w.rows()) throw DimensionError("classifier_loss_grad: embedding dim mismatch");
    const Matrix p = row_softmax(matmul(h, w));
    if (!p.same_shape(target)) throw DimensionError("classifier_loss_grad: target shape mismatch");

    ClassifierGrad out;
    out.loss = masked_cross_entropy(p, target, mask);

    // same clamp-aware seed as the student head: a = -y [p > eps] / m,
    // dL/dlogits = a - p rowsum(a)
    Matrix r(p.rows(), p.cols());
    const double inv_m = 1.0 / static_cast<double>(mask.size());
    for (int v : mask) {
        double row_a = 0.0;
        for (int j = 0; j < p.cols(); ++j) {
            r(v, j) = p(v, j) > kLogClamp ? -target(v, j) * inv_m : 0.0;
            row_a += r(v, j);
        }
        for (int j = 0; j < p.cols(); ++j) r(v, j) -= p(v, j) * row_a;
    }
    out.grad = matmul(transpose(h), r);
    return out;
}

Matrix train_classifier(const Matrix& h, const LabelState& labels, const std::vector<int>& mask,
                        int epochs, double lr) {
    const std::vector<int> supervised = labels.supervising_nodes(mask);
    if (supervised.empty()) throw ValidationError("train_classifier: no supervising nodes in mask");

    std::vector<int> seen(labels.c, 0);
    for (int v : supervised) seen[labels.label[v]] = 1;
    for (int cls = 0; cls < labels.c; ++cls)
        if (!seen[cls])
            throw ValidationError("train_classifier: class " + std::to_string(cls) +
                                  " absent from the training mask");

    const Matrix target = labels.one_hot();
    Matrix w(h.cols(), labels.c);  // zero init: epoch 0 predicts uniformly
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const ClassifierGrad g = classifier_loss_grad(h, w, target, supervised);
        w -= g.grad * lr;
    }
    require_finite(w, "classifier weights");
    return w;
}

TeacherEnsemble ensemble_predict(const std::vector<std::unique_ptr<TeacherEncoder>>& encoders,
                                 const std::vector<Matrix>& classifiers, const Graph& g) {
    if (encoders.size() != classifiers.size())
        throw ArgumentError("ensemble_predict: one classifier per encoder required");
    TeacherEnsemble ens;
    ens.teachers.reserve(encoders.size());
    for (size_t i = 0; i < encoders.size(); ++i) {
        Teacher t;
        t.h = encoders[i]->embed(g);
        t.classifier = classifiers[i];
        t.p = row_softmax(matmul(t.h, t.classifier));
        ens.teachers.push_back(std::move(t));
    }
    return ens;
}

}  // namespace bonnc
