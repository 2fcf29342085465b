#pragma once

#include <cstdint>
#include <vector>

#include "bonnc/cleanselect.hpp"
#include "bonnc/gcn_grad.hpp"
#include "bonnc/graph.hpp"
#include "bonnc/student.hpp"
#include "bonnc/teachers.hpp"

namespace bonnc {

/// The k x c upper-level variable: one weight per (teacher, class).
struct TeacherWeightMatrix {
    Matrix w;           // k x c
    double lr = 0.5;
    int updates = 0;

    TeacherWeightMatrix() = default;
    TeacherWeightMatrix(int k, int c, double init, double learning_rate)
        : w(Matrix::constant(k, c, init)), lr(learning_rate) {}
};

/// Row-stochastic fused teacher prediction. Inside a window it also carries
/// the tangent of each row with respect to every W entry (direction
/// d = j*c + c' for entry W[j][c']).
struct SoftLabels {
    Matrix y;                      // n x c
    std::vector<Matrix> tangents;  // k*c of n x c, empty when not tracked

    int directions() const { return static_cast<int>(tangents.size()); }
};

/// Per-node fusion softmax(sum_j W_j .* p_j) plus, when requested, its exact
/// tangents with respect to the W entries.
SoftLabels fuse_soft_labels(const TeacherEnsemble& ens, const TeacherWeightMatrix& w,
                            bool with_tangents);

/// Student parameters as duals, carrying d theta / d W_d for every direction
/// through the unrolled inner loop. Tangents start at zero each window.
struct TangentBundle {
    Dual w0;
    Dual w1;
    int t = 0;             // inner steps taken in the current window
    double eta = 0.05;     // inner learning rate
    double last_loss = 0.0;

    TangentBundle() = default;
    TangentBundle(const StudentParams& params, double eta_mu, int directions);

    StudentParams params() const;

    /// Starts a new window: zero tangents, step counter back to 0.
    void reset_window(int directions);
};

/// One gradient-descent step on the lower loss over the train mask; values
/// and tangents advance together (the tangent update is the directional
/// second derivative applied to the previous tangents plus the soft-label
/// coupling term).
void inner_step(TangentBundle& bundle, const SoftLabels& soft, const Graph& g,
                const std::vector<int>& train_mask);

/// Mean cross-entropy of the current student prediction against the clean
/// nodes' labels.
double upper_loss(const TangentBundle& bundle, const CleanNodeSet& clean, const Graph& g);

/// Contracts the upper-loss parameter gradient with each tangent direction;
/// the direct term vanishes because W does not appear in the upper loss.
/// A bundle with t == 0 yields the exact zero matrix.
Matrix hypergradient(const TangentBundle& bundle, const CleanNodeSet& clean, const Graph& g,
                     int k, int c);

/// Plain gradient descent on W. Non-finite gradients skip the update with a
/// warning.
void upper_step(TeacherWeightMatrix& w, const Matrix& grad);

struct DistillationConfig {
    int window_length = 5;    // inner steps per window (t)
    int windows = 60;
    double eta_mu = 0.05;     // inner learning rate
    double eta_lr_upper = 0.5;
    bool update_w = true;     // false freezes W (mean-style fusion)

    std::vector<int> val_mask;     // optional, for model selection
    std::vector<int> val_labels;   // full-length, -1 unknown
};

struct WindowRecord {
    int window = 0;
    double lower_loss = 0.0;   // L_s at the window's last inner step
    double upper_loss = 0.0;   // L_w after the window, NaN when skipped
    double val_accuracy = 0.0; // NaN when no validation mask
    Matrix w_snapshot;         // W after this window's upper update
};

struct DistillationResult {
    StudentParams student;          // final parameters
    TeacherWeightMatrix w;          // final teacher weights
    std::vector<WindowRecord> history;
    StudentParams best_student;     // highest validation accuracy snapshot
    double best_val_accuracy = -1.0;
    int best_window = -1;
    bool upper_skipped = false;     // any window skipped its upper update
};

/// The alternation: refresh soft labels, run one window of inner steps with
/// tangents, take one upper step from the hypergradient, reset tangents.
/// Student and W warm-start from the passed-in values.
DistillationResult run_distillation(const TeacherEnsemble& ens, const Graph& g,
                                    const LabelState& labels, const CleanNodeSet& clean,
                                    StudentParams init, TeacherWeightMatrix w_init,
                                    const DistillationConfig& cfg);

}  // namespace bonnc
