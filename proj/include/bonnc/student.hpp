#pragma once

#include <cstdint>
#include <vector>

#include "bonnc/gcn_grad.hpp"
#include "bonnc/graph.hpp"

namespace bonnc {

/// Parameters of the two-layer graph-convolution student.
struct StudentParams {
    Matrix w0;  // d x h
    Matrix w1;  // h x c
    double dropout = 0.5;

    int hidden() const { return w0.cols(); }
};

/// Glorot-range uniform initialization, seed-deterministic.
StudentParams init_params(int d, int h, int c, uint64_t seed);

struct StudentForward {
    Matrix z1;  // hidden representation after activation (and dropout)
    Matrix p;   // n x c row-stochastic predictions
};

/// Forward pass. Dropout applies to the hidden layer only and only in train
/// mode, with a mask drawn deterministically from the seed.
StudentForward student_forward(const StudentParams& params, const Graph& g, bool train_mode,
                               uint64_t seed);

/// The inverted-dropout scale mask student_forward uses in train mode.
Matrix dropout_mask(int n, int h, double rate, uint64_t seed);

struct BaselineConfig {
    int epochs = 300;
    double lr = 0.01;
    double weight_decay = 5e-4;
    int patience = 30;  // early-stopping window on validation accuracy
};

struct BaselineResult {
    StudentParams params;       // best-validation snapshot
    double best_val_accuracy = 0.0;
    int best_epoch = -1;
    std::vector<double> train_loss;
};

/// Plain supervised training of the student on the (possibly noisy) labels:
/// full-batch gradient descent with dropout and weight decay, model selection
/// by clean validation accuracy.
BaselineResult train_baseline_gcn(const Graph& g, const LabelState& labels,
                                  const std::vector<int>& train_mask,
                                  const std::vector<int>& val_mask, const std::vector<int>& val_labels,
                                  int hidden, double dropout, const BaselineConfig& cfg, uint64_t seed);

}  // namespace bonnc
