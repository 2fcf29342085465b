#include "bonnc/gcn_grad.hpp"

#include <cmath>

namespace bonnc {

namespace {

void validate_problem(const GcnProblem& prob, const Matrix& w0, const Matrix& w1) {
    if (prob.a_hat == nullptr || prob.x == nullptr)
        throw ArgumentError("GcnProblem: adjacency and features are required");
    if (prob.a_hat->n() != prob.x->rows())
        throw DimensionError("GcnProblem: adjacency size does not match feature rows");
    if (w0.rows() != prob.x->cols())
        throw DimensionError("GcnProblem: w0 rows must equal feature dim");
    if (w1.rows() != w0.cols())
        throw DimensionError("GcnProblem: w1 rows must equal hidden dim");
    if (prob.dropout_mask != nullptr &&
        (prob.dropout_mask->rows() != prob.x->rows() || prob.dropout_mask->cols() != w0.cols()))
        throw DimensionError("GcnProblem: dropout mask must be n x hidden");
}

/// a_ic = -target_ic * [p_ic > clamp] / m on masked rows, zero elsewhere.
/// R = a - p .* rowsum(a) is then the exact loss gradient w.r.t. the logits,
/// including the effect of the log clamp.
Matrix logit_grad_seed(const Matrix& p, const Matrix& target, const std::vector<int>& mask) {
    Matrix a(p.rows(), p.cols());
    const double inv_m = 1.0 / static_cast<double>(mask.size());
    for (int v : mask)
        for (int j = 0; j < p.cols(); ++j)
            if (p(v, j) > kLogClamp) a(v, j) = -target(v, j) * inv_m;
    return a;
}

Matrix logit_grad_from_seed(const Matrix& p, const Matrix& a) {
    Matrix r(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i) {
        double row_a = 0.0;
        for (int j = 0; j < p.cols(); ++j) row_a += a(i, j);
        for (int j = 0; j < p.cols(); ++j) r(i, j) = a(i, j) - p(i, j) * row_a;
    }
    return r;
}

/// Row-wise softmax JVP: dp_i = p_i .* (ds_i - <p_i, ds_i>).
Matrix softmax_jvp(const Matrix& p, const Matrix& s_dot) {
    Matrix out(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i) {
        double inner = 0.0;
        for (int j = 0; j < p.cols(); ++j) inner += p(i, j) * s_dot(i, j);
        for (int j = 0; j < p.cols(); ++j) out(i, j) = p(i, j) * (s_dot(i, j) - inner);
    }
    return out;
}

}  // namespace

GcnActivations gcn_forward(const GcnProblem& prob, const Matrix& w0, const Matrix& w1) {
    validate_problem(prob, w0, w1);
    GcnActivations act;
    act.u0 = prob.propagated_x != nullptr ? *prob.propagated_x : spmm(*prob.a_hat, *prob.x);
    act.s1 = matmul(act.u0, w0);
    require_finite(act.s1, "hidden pre-activation");

    act.dz1_ds1 = Matrix(act.s1.rows(), act.s1.cols());
    act.z1 = Matrix(act.s1.rows(), act.s1.cols());
    for (int i = 0; i < act.s1.rows(); ++i) {
        for (int j = 0; j < act.s1.cols(); ++j) {
            // relu with subgradient 0 at the kink
            const double keep = act.s1(i, j) > 0.0
                                    ? (prob.dropout_mask != nullptr ? (*prob.dropout_mask)(i, j) : 1.0)
                                    : 0.0;
            act.dz1_ds1(i, j) = keep;
            act.z1(i, j) = act.s1(i, j) * keep;
        }
    }

    act.u1 = spmm(*prob.a_hat, act.z1);
    act.s2 = matmul(act.u1, w1);
    require_finite(act.s2, "logits");
    act.p = row_softmax(act.s2);
    require_finite(act.p, "probabilities");
    return act;
}

GcnLossGrad gcn_loss_grad(const GcnProblem& prob, const Matrix& w0, const Matrix& w1,
                          const Matrix& target, const std::vector<int>& mask) {
    const GcnActivations act = gcn_forward(prob, w0, w1);
    if (!target.same_shape(act.p)) throw DimensionError("gcn_loss_grad: target shape mismatch");

    GcnLossGrad out;
    out.loss = masked_cross_entropy(act.p, target, mask);
    if (!std::isfinite(out.loss)) throw NumericError("non-finite values at stage: loss");

    const Matrix a = logit_grad_seed(act.p, target, mask);
    const Matrix r = logit_grad_from_seed(act.p, a);
    out.grad_w1 = matmul(transpose(act.u1), r);
    const Matrix du1 = matmul(r, transpose(w1));
    const Matrix dz1 = spmm(*prob.a_hat, du1);  // A_hat is symmetric
    const Matrix ds1 = hadamard(dz1, act.dz1_ds1);
    out.grad_w0 = matmul(transpose(act.u0), ds1);
    require_finite(out.grad_w0, "gradient w0");
    require_finite(out.grad_w1, "gradient w1");
    return out;
}

GcnGradResult grad_and_tangents(const GcnProblem& prob, const Dual& w0, const Dual& w1,
                                const Dual& target, const std::vector<int>& mask) {
    const int dirs = w0.directions();
    if (w1.directions() != dirs || target.directions() != dirs)
        throw DimensionError("grad_and_tangents: direction counts differ across duals");

    const GcnActivations act = gcn_forward(prob, w0.value, w1.value);
    if (!target.value.same_shape(act.p)) throw DimensionError("grad_and_tangents: target shape mismatch");

    GcnGradResult out;
    out.loss = masked_cross_entropy(act.p, target.value, mask);
    if (!std::isfinite(out.loss)) throw NumericError("non-finite values at stage: loss");

    const Matrix a = logit_grad_seed(act.p, target.value, mask);
    const Matrix r = logit_grad_from_seed(act.p, a);
    out.grad_w1 = matmul(transpose(act.u1), r);
    const Matrix du1 = matmul(r, transpose(w1.value));
    const Matrix dz1 = spmm(*prob.a_hat, du1);
    const Matrix ds1 = hadamard(dz1, act.dz1_ds1);
    out.grad_w0 = matmul(transpose(act.u0), ds1);
    require_finite(out.grad_w0, "gradient w0");
    require_finite(out.grad_w1, "gradient w1");

    out.loss_tangents.resize(dirs, 0.0);
    out.grad_w0_tangents.reserve(dirs);
    out.grad_w1_tangents.reserve(dirs);

    const double inv_m = 1.0 / static_cast<double>(mask.size());
    const Matrix w1_t = transpose(w1.value);

    for (int d = 0; d < dirs; ++d) {
        const Matrix& w0_dot = w0.tangents[d];
        const Matrix& w1_dot = w1.tangents[d];
        const Matrix& y_dot = target.tangents[d];

        // forward sweep of the tangent through the network
        const Matrix s1_dot = matmul(act.u0, w0_dot);
        const Matrix z1_dot = hadamard(s1_dot, act.dz1_ds1);
        const Matrix u1_dot = spmm(*prob.a_hat, z1_dot);
        Matrix s2_dot = matmul(u1_dot, w1.value);
        s2_dot += matmul(act.u1, w1_dot);
        const Matrix p_dot = softmax_jvp(act.p, s2_dot);

        // tangent of the loss and of the logit-gradient seed; the clamp
        // indicator is piecewise constant, so it passes through unchanged
        Matrix a_dot(act.p.rows(), act.p.cols());
        double loss_dot = 0.0;
        for (int v : mask) {
            for (int j = 0; j < act.p.cols(); ++j) {
                const bool open = act.p(v, j) > kLogClamp;
                if (open) a_dot(v, j) = -y_dot(v, j) * inv_m;
                loss_dot -= y_dot(v, j) * std::log(std::max(act.p(v, j), kLogClamp));
                if (open) loss_dot -= target.value(v, j) * p_dot(v, j) / act.p(v, j);
            }
        }
        out.loss_tangents[d] = loss_dot * inv_m;

        // tangent of R = a - p .* rowsum(a)
        Matrix r_dot(act.p.rows(), act.p.cols());
        for (int i = 0; i < act.p.rows(); ++i) {
            double row_a = 0.0, row_a_dot = 0.0;
            for (int j = 0; j < act.p.cols(); ++j) {
                row_a += a(i, j);
                row_a_dot += a_dot(i, j);
            }
            for (int j = 0; j < act.p.cols(); ++j)
                r_dot(i, j) = a_dot(i, j) - p_dot(i, j) * row_a - act.p(i, j) * row_a_dot;
        }

        // tangent of the reverse sweep
        Matrix g1_dot = matmul(transpose(u1_dot), r);
        g1_dot += matmul(transpose(act.u1), r_dot);

        Matrix du1_dot = matmul(r_dot, w1_t);
        du1_dot += matmul(r, transpose(w1_dot));
        const Matrix dz1_dot = spmm(*prob.a_hat, du1_dot);
        const Matrix ds1_dot = hadamard(dz1_dot, act.dz1_ds1);
        const Matrix g0_dot = matmul(transpose(act.u0), ds1_dot);

        require_finite(g0_dot, "gradient tangent w0");
        require_finite(g1_dot, "gradient tangent w1");
        out.grad_w0_tangents.push_back(g0_dot);
        out.grad_w1_tangents.push_back(g1_dot);
    }
    return out;
}

}  // namespace bonnc
