#pragma once

#include <vector>

#include "bonnc/linalg.hpp"

namespace bonnc {

/// Fixed forward-graph description: two graph-convolution layers, row
/// softmax, and a masked mean cross-entropy head. Gradients and tangents for
/// this architecture are hand-derived in gcn_grad.cpp; there is no general
/// tape.
struct GcnProblem {
    const SparseAdjacency* a_hat = nullptr;  // n x n, symmetric normalized
    const Matrix* x = nullptr;               // n x d node features

    /// Optional cache of spmm(a_hat, x); computed on the fly when null.
    const Matrix* propagated_x = nullptr;

    /// Optional inverted-dropout mask on the hidden layer (entries 0 or
    /// 1/(1-rate)); null disables dropout.
    const Matrix* dropout_mask = nullptr;
};

/// Intermediates of one forward pass, kept for the reverse and tangent
/// sweeps.
struct GcnActivations {
    Matrix u0;          // A_hat X
    Matrix s1;          // U0 W0 (hidden pre-activation)
    Matrix z1;          // relu(S1), dropout applied if configured
    Matrix u1;          // A_hat Z1
    Matrix s2;          // U1 W1 (logits)
    Matrix p;           // row_softmax(S2)
    Matrix dz1_ds1;     // combined relu/dropout factor, used by both sweeps
};

GcnActivations gcn_forward(const GcnProblem& prob, const Matrix& w0, const Matrix& w1);

struct GcnLossGrad {
    double loss = 0.0;
    Matrix grad_w0;
    Matrix grad_w1;
};

/// Loss and exact reverse-mode gradients of the masked mean cross-entropy
/// against `target` with respect to both weight matrices.
GcnLossGrad gcn_loss_grad(const GcnProblem& prob, const Matrix& w0, const Matrix& w1,
                          const Matrix& target, const std::vector<int>& mask);

struct GcnGradResult {
    double loss = 0.0;
    Matrix grad_w0;
    Matrix grad_w1;
    std::vector<double> loss_tangents;       // directional derivative of the loss
    std::vector<Matrix> grad_w0_tangents;    // directional derivative of grad_w0
    std::vector<Matrix> grad_w1_tangents;    // directional derivative of grad_w1
};

/// Reverse-mode gradients plus, for every tracked direction, the forward-mode
/// tangent of those gradients (forward-over-reverse). Direction d combines
/// the parameter tangents w0.tangents[d], w1.tangents[d] with the target
/// tangent target.tangents[d]; all three duals must carry the same direction
/// count. Non-finite intermediates raise NumericError naming the stage.
GcnGradResult grad_and_tangents(const GcnProblem& prob, const Dual& w0, const Dual& w1,
                                const Dual& target, const std::vector<int>& mask);

}  // namespace bonnc
