#include "bonnc/bilevel.hpp"

#include <cmath>
#include <iostream>

namespace bonnc {

SoftLabels fuse_soft_labels(const TeacherEnsemble& ens, const TeacherWeightMatrix& w,
                            bool with_tangents) {
    const int k = ens.k();
    const int c = ens.classes();
    const int n = ens.n();
    if (w.w.rows() != k || w.w.cols() != c)
        throw DimensionError("fuse_soft_labels: W must be k x c");

    Matrix logits(n, c);
    for (int j = 0; j < k; ++j) {
        const Matrix& p = ens.teachers[j].p;
        for (int i = 0; i < n; ++i)
            for (int cc = 0; cc < c; ++cc) logits(i, cc) += w.w(j, cc) * p(i, cc);
    }

    SoftLabels soft;
    soft.y = row_softmax(logits);
    require_finite(soft.y, "soft labels");

    if (with_tangents) {
        soft.tangents.reserve(static_cast<size_t>(k) * c);
        for (int j = 0; j < k; ++j) {
            for (int cp = 0; cp < c; ++cp) {
                // d logits[i][*] / d W[j][cp] is P_j[i][cp] on coordinate cp;
                // push through the softmax jvp row by row
                const Matrix& p = ens.teachers[j].p;
                Matrix tan(n, c);
                for (int i = 0; i < n; ++i) {
                    const double l_dot = p(i, cp);
                    const double inner = soft.y(i, cp) * l_dot;
                    for (int cc = 0; cc < c; ++cc) {
                        const double s_dot = cc == cp ? l_dot : 0.0;
                        tan(i, cc) = soft.y(i, cc) * (s_dot - inner);
                    }
                }
                soft.tangents.push_back(std::move(tan));
            }
        }
    }
    return soft;
}

TangentBundle::TangentBundle(const StudentParams& params, double eta_mu, int directions)
    : w0(params.w0), w1(params.w1), eta(eta_mu) {
    w0.reset_tangents(directions);
    w1.reset_tangents(directions);
}

StudentParams TangentBundle::params() const {
    StudentParams p;
    p.w0 = w0.value;
    p.w1 = w1.value;
    p.dropout = 0.0;  // windows run without dropout so the unrolled map is deterministic
    return p;
}

void TangentBundle::reset_window(int directions) {
    w0.reset_tangents(directions);
    w1.reset_tangents(directions);
    t = 0;
}

void inner_step(TangentBundle& bundle, const SoftLabels& soft, const Graph& g,
                const std::vector<int>& train_mask) {
    if (train_mask.empty()) throw ArgumentError("inner_step: empty train mask");
    if (soft.directions() != bundle.w0.directions())
        throw DimensionError("inner_step: soft-label tangent count differs from bundle");

    GcnProblem prob;
    prob.a_hat = &g.a_hat;
    prob.x = &g.x;

    Dual target(soft.y, soft.tangents);
    const GcnGradResult res = grad_and_tangents(prob, bundle.w0, bundle.w1, target, train_mask);
    bundle.last_loss = res.loss;

    bundle.w0.value -= res.grad_w0 * bundle.eta;
    bundle.w1.value -= res.grad_w1 * bundle.eta;
    for (int d = 0; d < bundle.w0.directions(); ++d) {
        bundle.w0.tangents[d] -= res.grad_w0_tangents[d] * bundle.eta;
        bundle.w1.tangents[d] -= res.grad_w1_tangents[d] * bundle.eta;
    }
    bundle.t += 1;
}

namespace {

Matrix clean_target(const CleanNodeSet& clean, int n, int c) {
    Matrix target(n, c);
    for (const CleanNode& cn : clean.nodes) target(cn.node, cn.y_hat) = 1.0;
    return target;
}

std::vector<int> clean_mask(const CleanNodeSet& clean) {
    std::vector<int> mask;
    mask.reserve(clean.size());
    for (const CleanNode& cn : clean.nodes) mask.push_back(cn.node);
    return mask;
}

}  // namespace

double upper_loss(const TangentBundle& bundle, const CleanNodeSet& clean, const Graph& g) {
    if (clean.empty()) throw ArgumentError("upper_loss: empty clean set");
    GcnProblem prob;
    prob.a_hat = &g.a_hat;
    prob.x = &g.x;
    const GcnActivations act = gcn_forward(prob, bundle.w0.value, bundle.w1.value);
    return masked_cross_entropy(act.p, clean_target(clean, g.n, act.p.cols()), clean_mask(clean));
}

Matrix hypergradient(const TangentBundle& bundle, const CleanNodeSet& clean, const Graph& g,
                     int k, int c) {
    Matrix grad(k, c);
    if (bundle.t == 0) return grad;  // Z_0 = 0
    if (bundle.w0.directions() != k * c)
        throw DimensionError("hypergradient: bundle does not track k*c directions");
    if (clean.empty()) throw ArgumentError("hypergradient: empty clean set");

    GcnProblem prob;
    prob.a_hat = &g.a_hat;
    prob.x = &g.x;
    const GcnLossGrad upper = gcn_loss_grad(prob, bundle.w0.value, bundle.w1.value,
                                            clean_target(clean, g.n, c), clean_mask(clean));

    for (int j = 0; j < k; ++j)
        for (int cp = 0; cp < c; ++cp) {
            const int d = j * c + cp;
            grad(j, cp) = dot(upper.grad_w0, bundle.w0.tangents[d]) +
                          dot(upper.grad_w1, bundle.w1.tangents[d]);
        }
    return grad;
}

void upper_step(TeacherWeightMatrix& w, const Matrix& grad) {
    if (!grad.same_shape(w.w)) throw DimensionError("upper_step: gradient shape mismatch");
    if (!all_finite(grad)) {
        std::cerr << "warning: non-finite teacher-weight gradient, update skipped\n";
        return;
    }
    w.w -= grad * w.lr;
    w.updates += 1;
}

DistillationResult run_distillation(const TeacherEnsemble& ens, const Graph& g,
                                    const LabelState& labels, const CleanNodeSet& clean,
                                    StudentParams init, TeacherWeightMatrix w_init,
                                    const DistillationConfig& cfg) {
    const int k = ens.k();
    const int c = ens.classes();
    const int directions = cfg.update_w ? k * c : 0;
    const std::vector<int> train_mask = labels.supervising_nodes();
    if (train_mask.empty()) throw ValidationError("run_distillation: no supervising nodes");

    DistillationResult out;
    out.w = std::move(w_init);

    TangentBundle bundle(init, cfg.eta_mu, directions);
    out.best_student = init;

    GcnProblem eval_prob;
    eval_prob.a_hat = &g.a_hat;
    eval_prob.x = &g.x;

    for (int window = 0; window < cfg.windows; ++window) {
        const SoftLabels soft = fuse_soft_labels(ens, out.w, cfg.update_w);

        bundle.reset_window(directions);
        for (int step = 0; step < cfg.window_length; ++step) inner_step(bundle, soft, g, train_mask);

        WindowRecord rec;
        rec.window = window;
        rec.lower_loss = bundle.last_loss;

        if (!clean.empty()) {
            rec.upper_loss = upper_loss(bundle, clean, g);
            if (cfg.update_w) upper_step(out.w, hypergradient(bundle, clean, g, k, c));
        } else {
            rec.upper_loss = std::nan("");
            out.upper_skipped = true;
        }
        rec.w_snapshot = out.w.w;

        if (!cfg.val_mask.empty()) {
            const GcnActivations eval = gcn_forward(eval_prob, bundle.w0.value, bundle.w1.value);
            rec.val_accuracy = accuracy(eval.p, cfg.val_labels, cfg.val_mask);
            if (rec.val_accuracy > out.best_val_accuracy) {
                out.best_val_accuracy = rec.val_accuracy;
                out.best_window = window;
                out.best_student = bundle.params();
            }
        } else {
            rec.val_accuracy = std::nan("");
        }
        out.history.push_back(std::move(rec));
    }

    out.student = bundle.params();
    if (cfg.val_mask.empty()) out.best_student = out.student;
    return out;
}

}  // namespace bonnc
