// Test-only reference implementations: finite differences, a dense forward
// re-implementation, brute-force selection rules, and a trajectory-storing
// reverse-mode oracle for the unrolled window. Everything here is derived
// independently of the library code it checks (shared pieces are only the
// Matrix container and elementary products).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bonnc/bilevel.hpp"
#include "bonnc/gcn_grad.hpp"
#include "bonnc/graph.hpp"
#include "bonnc/linalg.hpp"
#include "bonnc/rng.hpp"
#include "bonnc/teachers.hpp"

namespace oracle {

using bonnc::Matrix;

/// ||a - b||_F / max(||b||_F, floor)
inline double rel_error(const Matrix& a, const Matrix& b, double floor = 1e-12) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        num += d * d;
        den += b.data()[i] * b.data()[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

/// Central-difference gradient of a scalar function with respect to every
/// entry of m.
inline Matrix fd_grad(const std::function<double()>& value, Matrix& m, double h) {
    Matrix grad(m.rows(), m.cols());
    for (size_t i = 0; i < m.size(); ++i) {
        const double keep = m.data()[i];
        m.data()[i] = keep + h;
        const double up = value();
        m.data()[i] = keep - h;
        const double down = value();
        m.data()[i] = keep;
        grad.data()[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

/// Dense re-implementation of the two-layer forward pass, written from the
/// definition (dense matrices, explicit loops) rather than the CSR kernels.
inline Matrix dense_forward_probs(const Matrix& a_hat_dense, const Matrix& x, const Matrix& w0,
                                  const Matrix& w1) {
    const auto mm = [](const Matrix& a, const Matrix& b) {
        Matrix out(a.rows(), b.cols());
        for (int i = 0; i < a.rows(); ++i)
            for (int l = 0; l < a.cols(); ++l)
                for (int j = 0; j < b.cols(); ++j) out(i, j) += a(i, l) * b(l, j);
        return out;
    };
    Matrix z1 = mm(mm(a_hat_dense, x), w0);
    for (double& v : z1.data()) v = v > 0.0 ? v : 0.0;
    Matrix s2 = mm(mm(a_hat_dense, z1), w1);
    Matrix p(s2.rows(), s2.cols());
    for (int i = 0; i < s2.rows(); ++i) {
        double mx = s2(i, 0);
        for (int j = 1; j < s2.cols(); ++j) mx = std::max(mx, s2(i, j));
        double sum = 0.0;
        for (int j = 0; j < s2.cols(); ++j) sum += std::exp(s2(i, j) - mx);
        for (int j = 0; j < s2.cols(); ++j) p(i, j) = std::exp(s2(i, j) - mx) / sum;
    }
    return p;
}

// ---------------------------------------------------------------------------
// trajectory-storing reverse-mode oracle for one unrolled window
// ---------------------------------------------------------------------------

struct WindowSetup {
    const bonnc::Graph* graph = nullptr;
    Matrix soft_labels;                 // fixed within the window
    std::vector<int> train_mask;
    Matrix clean_target;                // one-hot rows on clean nodes
    std::vector<int> clean_mask;
    double eta = 0.05;
    int steps = 1;
};

struct GradVjpResult {
    Matrix w0_bar;
    Matrix w1_bar;
    Matrix y_bar;
};

/// Adjoint of the lower-loss gradient computation: given cotangents on
/// (grad_w0, grad_w1), returns cotangents on (w0, w1, soft labels). Derived
/// by reversing the gradient computation stage by stage; the relu and clamp
/// indicator masks are piecewise constant.
inline GradVjpResult grad_vjp(const WindowSetup& s, const Matrix& w0, const Matrix& w1,
                              const Matrix& g0_bar, const Matrix& g1_bar) {
    using bonnc::hadamard;
    using bonnc::matmul;
    using bonnc::row_softmax;
    using bonnc::spmm;
    using bonnc::transpose;

    const bonnc::SparseAdjacency& adj = s.graph->a_hat;
    const Matrix u0 = spmm(adj, s.graph->x);
    const Matrix s1 = matmul(u0, w0);
    Matrix relu_mask(s1.rows(), s1.cols());
    Matrix z1(s1.rows(), s1.cols());
    for (size_t i = 0; i < s1.size(); ++i) {
        relu_mask.data()[i] = s1.data()[i] > 0.0 ? 1.0 : 0.0;
        z1.data()[i] = std::max(s1.data()[i], 0.0);
    }
    const Matrix u1 = spmm(adj, z1);
    const Matrix s2 = matmul(u1, w1);
    const Matrix p = row_softmax(s2);

    const double inv_m = 1.0 / static_cast<double>(s.train_mask.size());
    Matrix a(p.rows(), p.cols());
    for (int v : s.train_mask)
        for (int j = 0; j < p.cols(); ++j)
            if (p(v, j) > bonnc::kLogClamp) a(v, j) = -s.soft_labels(v, j) * inv_m;

    std::vector<double> row_a(p.rows(), 0.0);
    Matrix r(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i) {
        for (int j = 0; j < p.cols(); ++j) row_a[i] += a(i, j);
        for (int j = 0; j < p.cols(); ++j) r(i, j) = a(i, j) - p(i, j) * row_a[i];
    }

    // reverse sweep
    const Matrix ds1_bar = matmul(u0, g0_bar);
    const Matrix dz1_bar = hadamard(ds1_bar, relu_mask);
    const Matrix du1_bar = spmm(adj, dz1_bar);

    Matrix r_bar = matmul(du1_bar, w1);
    Matrix w1_bar = matmul(transpose(du1_bar), r);
    Matrix u1_bar = matmul(r, transpose(g1_bar));
    r_bar += matmul(u1, g1_bar);

    Matrix a_bar(p.rows(), p.cols());
    Matrix p_bar(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i) {
        double rp = 0.0;
        for (int j = 0; j < p.cols(); ++j) rp += r_bar(i, j) * p(i, j);
        for (int j = 0; j < p.cols(); ++j) {
            a_bar(i, j) = r_bar(i, j) - rp;
            p_bar(i, j) = -r_bar(i, j) * row_a[i];
        }
    }

    Matrix y_bar(p.rows(), p.cols());
    for (int v : s.train_mask)
        for (int j = 0; j < p.cols(); ++j)
            if (p(v, j) > bonnc::kLogClamp) y_bar(v, j) = -a_bar(v, j) * inv_m;

    Matrix s2_bar(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i) {
        double pp = 0.0;
        for (int j = 0; j < p.cols(); ++j) pp += p_bar(i, j) * p(i, j);
        for (int j = 0; j < p.cols(); ++j) s2_bar(i, j) = p(i, j) * (p_bar(i, j) - pp);
    }

    u1_bar += matmul(s2_bar, transpose(w1));
    w1_bar += matmul(transpose(u1), s2_bar);

    const Matrix z1_bar = spmm(adj, u1_bar);
    const Matrix s1_bar = hadamard(z1_bar, relu_mask);
    const Matrix w0_bar = matmul(transpose(u0), s1_bar);

    return {w0_bar, w1_bar, y_bar};
}

struct ReverseWindowResult {
    Matrix y_bar;   // d L_w / d soft labels through the whole window
    double upper_loss = 0.0;
};

/// Runs the window forward storing the trajectory, then accumulates the
/// upper-loss gradient backward through every step. Returns the cotangent on
/// the (fixed) soft labels; contracting it with d soft / d W gives the
/// hypergradient.
inline ReverseWindowResult reverse_window(const WindowSetup& s, Matrix w0, Matrix w1) {
    bonnc::GcnProblem prob;
    prob.a_hat = &s.graph->a_hat;
    prob.x = &s.graph->x;

    std::vector<std::pair<Matrix, Matrix>> trajectory;  // theta_0 .. theta_{t-1}
    for (int step = 0; step < s.steps; ++step) {
        trajectory.push_back({w0, w1});
        const bonnc::GcnLossGrad g = bonnc::gcn_loss_grad(prob, w0, w1, s.soft_labels, s.train_mask);
        w0 -= g.grad_w0 * s.eta;
        w1 -= g.grad_w1 * s.eta;
    }

    ReverseWindowResult out;
    const bonnc::GcnLossGrad upper = bonnc::gcn_loss_grad(prob, w0, w1, s.clean_target, s.clean_mask);
    out.upper_loss = upper.loss;

    Matrix v0 = upper.grad_w0;
    Matrix v1 = upper.grad_w1;
    out.y_bar = Matrix(s.soft_labels.rows(), s.soft_labels.cols());
    for (int step = s.steps - 1; step >= 0; --step) {
        const auto& [tw0, tw1] = trajectory[static_cast<size_t>(step)];
        const GradVjpResult vjp = grad_vjp(s, tw0, tw1, v0, v1);
        out.y_bar -= vjp.y_bar * s.eta;
        v0 -= vjp.w0_bar * s.eta;
        v1 -= vjp.w1_bar * s.eta;
    }
    return out;
}

/// Contracts the soft-label cotangent with the fusion Jacobian
/// d softmax(sum_j W_j .* P_j) / d W to finish the reverse-mode
/// hypergradient.
inline Matrix fuse_vjp(const bonnc::TeacherEnsemble& ens, const Matrix& w, const Matrix& y_bar) {
    const int k = ens.k();
    const int c = ens.classes();
    const int n = ens.n();

    Matrix logits(n, c);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i)
            for (int cc = 0; cc < c; ++cc) logits(i, cc) += w(j, cc) * ens.teachers[j].p(i, cc);
    const Matrix y = bonnc::row_softmax(logits);

    Matrix l_bar(n, c);
    for (int i = 0; i < n; ++i) {
        double inner = 0.0;
        for (int cc = 0; cc < c; ++cc) inner += y_bar(i, cc) * y(i, cc);
        for (int cc = 0; cc < c; ++cc) l_bar(i, cc) = y(i, cc) * (y_bar(i, cc) - inner);
    }

    Matrix w_bar(k, c);
    for (int j = 0; j < k; ++j)
        for (int cc = 0; cc < c; ++cc) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += l_bar(i, cc) * ens.teachers[j].p(i, cc);
            w_bar(j, cc) = acc;
        }
    return w_bar;
}

// ---------------------------------------------------------------------------
// brute-force selection references
// ---------------------------------------------------------------------------

inline int brute_argmax(const Matrix& m, int row) {
    int best = 0;
    for (int j = 1; j < m.cols(); ++j)
        if (m(row, j) > m(row, best)) best = j;
    return best;
}

inline std::vector<int> brute_consensus(const bonnc::TeacherEnsemble& ens,
                                        const std::vector<int>& unlabelled) {
    std::vector<int> out;
    for (int v : unlabelled) {
        bool agree = true;
        for (int j = 1; j < ens.k(); ++j)
            if (brute_argmax(ens.teachers[j].p, v) != brute_argmax(ens.teachers[0].p, v)) agree = false;
        if (agree) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> brute_xi(const bonnc::TeacherEnsemble& ens,
                                    const std::vector<int>& can, int beta1) {
    std::vector<double> xi(can.size(), 0.0);
    for (size_t i = 0; i < can.size(); ++i) {
        const int cls = brute_argmax(ens.teachers[0].p, can[i]);
        for (int j = 0; j < ens.k(); ++j) {
            std::vector<double> dists;
            for (size_t u = 0; u < can.size(); ++u) {
                if (u == i || brute_argmax(ens.teachers[0].p, can[u]) != cls) continue;
                double acc = 0.0;
                for (int f = 0; f < ens.teachers[j].h.cols(); ++f) {
                    const double d = ens.teachers[j].h(can[i], f) - ens.teachers[j].h(can[u], f);
                    acc += d * d;
                }
                dists.push_back(std::sqrt(acc));
            }
            std::sort(dists.begin(), dists.end());
            for (size_t t = 0; t < std::min<size_t>(dists.size(), static_cast<size_t>(beta1)); ++t)
                xi[i] += dists[t];
        }
    }
    return xi;
}

/// Per-class top selection: comparator picks "better" first, ties by lowest
/// node id; returns the chosen nodes of every class, sorted by id.
inline std::vector<int> brute_top_per_class(const std::vector<int>& nodes,
                                            const std::vector<int>& classes,
                                            const std::vector<double>& score, int per_class,
                                            int num_classes, bool smallest) {
    std::vector<int> out;
    for (int cls = 0; cls < num_classes; ++cls) {
        std::vector<std::pair<double, int>> bucket;
        for (size_t i = 0; i < nodes.size(); ++i)
            if (classes[i] == cls) bucket.push_back({score[i], nodes[i]});
        std::sort(bucket.begin(), bucket.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return smallest ? a.first < b.first : a.first > b.first;
            return a.second < b.second;
        });
        for (size_t t = 0; t < std::min<size_t>(bucket.size(), static_cast<size_t>(per_class)); ++t)
            out.push_back(bucket[t].second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
