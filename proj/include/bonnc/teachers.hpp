#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bonnc/graph.hpp"
#include "bonnc/linalg.hpp"

namespace bonnc {

/// A frozen self-supervised embedding model. fit never reads labels; embed
/// is deterministic once fitted.
class TeacherEncoder {
public:
    virtual ~TeacherEncoder() = default;

    virtual void fit(const Graph& g, uint64_t seed) = 0;
    virtual Matrix embed(const Graph& g) const = 0;  // n x dim()
    virtual int dim() const = 0;
    virtual std::string name() const = 0;
};

struct EncoderConfig {
    int epochs = 100;
    double lr = 0.05;
};

/// Two propagation hops followed by a fixed random orthonormal projection.
/// Training-free; captures the graph's smoothing geometry.
class PropagationEncoder : public TeacherEncoder {
public:
    PropagationEncoder(int out_dim, bool identity_projection = false)
        : out_dim_(out_dim), identity_(identity_projection) {}

    void fit(const Graph& g, uint64_t seed) override;
    Matrix embed(const Graph& g) const override;
    int dim() const override { return out_dim_; }
    std::string name() const override { return "propagation"; }

private:
    int out_dim_;
    bool identity_;
    Matrix projection_;  // d x out_dim
};

/// One graph-convolution layer trained with a bilinear discriminator that
/// scores true nodes above feature-row-shuffled corruptions.
class ContrastiveEncoder : public TeacherEncoder {
public:
    ContrastiveEncoder(int out_dim, EncoderConfig cfg = {}) : out_dim_(out_dim), cfg_(cfg) {}

    void fit(const Graph& g, uint64_t seed) override;
    Matrix embed(const Graph& g) const override;
    int dim() const override { return out_dim_; }
    std::string name() const override { return "contrastive"; }

    const std::vector<double>& fit_loss_curve() const { return loss_curve_; }

private:
    int out_dim_;
    EncoderConfig cfg_;
    Matrix weight_;  // d x out_dim
    std::vector<double> loss_curve_;
};

/// One graph-convolution layer trained so embedding inner products predict
/// adjacency entries (sampled edges vs. non-edges, logistic loss).
class ReconstructionEncoder : public TeacherEncoder {
public:
    ReconstructionEncoder(int out_dim, EncoderConfig cfg = {}) : out_dim_(out_dim), cfg_(cfg) {}

    void fit(const Graph& g, uint64_t seed) override;
    Matrix embed(const Graph& g) const override;
    int dim() const override { return out_dim_; }
    std::string name() const override { return "reconstruction"; }

    const std::vector<double>& fit_loss_curve() const { return loss_curve_; }

private:
    int out_dim_;
    EncoderConfig cfg_;
    Matrix weight_;  // d x out_dim
    std::vector<double> loss_curve_;
};

/// The three built-in encoders with deliberately different inductive biases.
/// `seed` salts each encoder's fit stream so they stay decorrelated.
std::vector<std::unique_ptr<TeacherEncoder>> builtin_encoders(int embed_dim, uint64_t seed,
                                                              const EncoderConfig& cfg = {});

/// Loss and gradient of the mean masked cross-entropy of row_softmax(H W)
/// against the one-hot labels; exposed so tests can finite-difference it.
struct ClassifierGrad {
    double loss = 0.0;
    Matrix grad;  // d_i x c
};
ClassifierGrad classifier_loss_grad(const Matrix& h, const Matrix& w, const Matrix& target,
                                    const std::vector<int>& mask);

/// Trains a single linear layer (zero-initialized, no bias) by full-batch
/// gradient descent over the supervising nodes of `mask`. Every class must
/// be represented.
Matrix train_classifier(const Matrix& h, const LabelState& labels, const std::vector<int>& mask,
                        int epochs, double lr);

struct Teacher {
    Matrix h;           // n x d_i embeddings
    Matrix classifier;  // d_i x c
    Matrix p;           // n x c row-stochastic predictions
};

struct TeacherEnsemble {
    std::vector<Teacher> teachers;

    int k() const { return static_cast<int>(teachers.size()); }
    int classes() const { return teachers.empty() ? 0 : teachers.front().p.cols(); }
    int n() const { return teachers.empty() ? 0 : teachers.front().p.rows(); }

    /// Tie-broken (lowest class) argmax of teacher j's prediction for node v.
    int predicted_class(int j, int v) const { return argmax_row(teachers[j].p, v); }
};

/// Embeds the graph with every fitted encoder and applies its classifier;
/// predictions cover all nodes, labelled or not.
TeacherEnsemble ensemble_predict(const std::vector<std::unique_ptr<TeacherEncoder>>& encoders,
                                 const std::vector<Matrix>& classifiers, const Graph& g);

}  // namespace bonnc
