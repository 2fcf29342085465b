#include "bonnc/student.hpp"

#include <cmath>

#include "bonnc/rng.hpp"

namespace bonnc {

namespace {

Matrix glorot_uniform(int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    return m;
}

}  // namespace

StudentParams init_params(int d, int h, int c, uint64_t seed) {
    if (d <= 0 || h <= 0 || c <= 0) throw ValidationError("init_params: dimensions must be positive");
    Rng rng(derive_seed(seed, 0x57u));
    StudentParams p;
    p.w0 = glorot_uniform(d, h, rng);
    p.w1 = glorot_uniform(h, c, rng);
    return p;
}

Matrix dropout_mask(int n, int h, double rate, uint64_t seed) {
    if (rate < 0.0 || rate >= 1.0) throw ValidationError("dropout_mask: rate must lie in [0,1)");
    Matrix m(n, h);
    if (rate == 0.0) {
        m.fill(1.0);
        return m;
    }
    Rng rng(derive_seed(seed, 0xD20u));
    const double keep_scale = 1.0 / (1.0 - rate);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < h; ++j) m(i, j) = rng.uniform() < rate ? 0.0 : keep_scale;
    return m;
}

StudentForward student_forward(const StudentParams& params, const Graph& g, bool train_mode,
                               uint64_t seed) {
    GcnProblem prob;
    prob.a_hat = &g.a_hat;
    prob.x = &g.x;
    Matrix mask;
    if (train_mode && params.dropout > 0.0) {
        mask = dropout_mask(g.n, params.hidden(), params.dropout, seed);
        prob.dropout_mask = &mask;
    }
    GcnActivations act = gcn_forward(prob, params.w0, params.w1);
    return {std::move(act.z1), std::move(act.p)};
}

BaselineResult train_baseline_gcn(const Graph& g, const LabelState& labels,
                                  const std::vector<int>& train_mask,
                                  const std::vector<int>& val_mask, const std::vector<int>& val_labels,
                                  int hidden, double dropout, const BaselineConfig& cfg, uint64_t seed) {
    const std::vector<int> supervised = labels.supervising_nodes(train_mask);
    if (supervised.empty()) throw ValidationError("train_baseline_gcn: no supervising training nodes");
    const Matrix target = labels.one_hot();
    const Matrix propagated = spmm(g.a_hat, g.x);

    StudentParams params = init_params(g.d, hidden, labels.c, seed);
    params.dropout = dropout;

    BaselineResult best;
    best.params = params;
    best.best_val_accuracy = -1.0;
    int since_best = 0;

    GcnProblem prob;
    prob.a_hat = &g.a_hat;
    prob.x = &g.x;
    prob.propagated_x = &propagated;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Matrix mask;
        if (dropout > 0.0) {
            mask = dropout_mask(g.n, hidden, dropout, derive_seed(seed, 1000 + epoch));
            prob.dropout_mask = &mask;
        } else {
            prob.dropout_mask = nullptr;
        }
        GcnLossGrad grad = gcn_loss_grad(prob, params.w0, params.w1, target, supervised);
        best.train_loss.push_back(grad.loss);

        grad.grad_w0 += params.w0 * cfg.weight_decay;
        grad.grad_w1 += params.w1 * cfg.weight_decay;
        params.w0 -= grad.grad_w0 * cfg.lr;
        params.w1 -= grad.grad_w1 * cfg.lr;

        prob.dropout_mask = nullptr;
        const GcnActivations eval = gcn_forward(prob, params.w0, params.w1);
        const double val_acc = val_mask.empty() ? 0.0 : accuracy(eval.p, val_labels, val_mask);
        if (val_acc > best.best_val_accuracy) {
            best.best_val_accuracy = val_acc;
            best.best_epoch = epoch;
            best.params = params;
            since_best = 0;
        } else if (++since_best > cfg.patience) {
            break;
        }
    }
    return best;
}

}  // namespace bonnc
