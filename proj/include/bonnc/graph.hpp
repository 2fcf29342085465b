#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bonnc/linalg.hpp"

namespace bonnc {

enum class NodeStatus : uint8_t {
    Unlabelled,
    Original,   // label came from the dataset (possibly noise-corrupted)
    Filtered,   // label suspected noisy and withdrawn from supervision
    Pseudo,     // label assigned by pseudo-label selection
};

const char* to_string(NodeStatus s);

/// Per-node label plus supervision status. Mutated only by the
/// label-improvement pass between training phases.
struct LabelState {
    int c = 0;
    std::vector<int> label;          // -1 when no label was ever recorded
    std::vector<NodeStatus> status;
    std::vector<int> pseudo_round;   // round that assigned the pseudo label, else -1

    LabelState() = default;
    LabelState(int n, int classes)
        : c(classes), label(n, -1), status(n, NodeStatus::Unlabelled), pseudo_round(n, -1) {}

    int n() const { return static_cast<int>(label.size()); }

    /// A node supervises training iff its status is Original or Pseudo.
    bool supervising(int v) const {
        return status[v] == NodeStatus::Original || status[v] == NodeStatus::Pseudo;
    }

    std::vector<int> supervising_nodes() const;

    /// Supervising nodes restricted to `mask` (ascending node order).
    std::vector<int> supervising_nodes(const std::vector<int>& mask) const;

    /// n x c matrix with one-hot rows for supervising nodes, zero rows
    /// elsewhere.
    Matrix one_hot() const;

    /// Copy keeping labels only on `keep` nodes; all others become
    /// unlabelled.
    LabelState restricted_to(const std::vector<int>& keep) const;

    bool operator==(const LabelState& o) const {
        return c == o.c && label == o.label && status == o.status && pseudo_round == o.pseudo_round;
    }
};

/// True labels of every node, kept outside the training path; only the
/// runner's evaluation and audit code reads it.
struct GroundTruth {
    std::vector<int> label;  // -1 unknown

    static GroundTruth from_labels(const LabelState& ls);
};

struct Graph {
    int n = 0;
    int d = 0;
    Matrix x;               // n x d features
    SparseAdjacency a;      // no self-loops stored
    SparseAdjacency a_hat;  // symmetric-normalized with self-loops
};

struct SplitMasks {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;
};

/// Returns D^{-1/2} (A + I) D^{-1/2} where D is the degree matrix of A + I.
/// Input must be symmetric and free of self-loops.
SparseAdjacency normalize_adjacency(const SparseAdjacency& a);

/// Reads a graph from an edge list ("src dst" per line, '#' comments), a
/// headerless feature CSV (one node per row) and a headerless "node,class"
/// label CSV. Edges are symmetrized and deduplicated. `expected_classes` = 0
/// infers the class count from the label file.
std::pair<Graph, LabelState> load_graph(const std::string& edge_file, const std::string& feature_file,
                                        const std::string& label_file, int expected_classes = 0);

/// Writes the three files back in the formats load_graph reads; loading them
/// reproduces the inputs exactly.
void save_graph(const Graph& g, const LabelState& labels, const std::string& edge_file,
                const std::string& feature_file, const std::string& label_file);

/// Stratified-by-class random split over the labelled nodes, without
/// replacement; per-class counts are round(fraction * class size).
SplitMasks make_splits(const LabelState& labels, double train_fraction, double val_fraction,
                       double test_fraction, uint64_t seed);

struct SbmParams {
    int n = 0;
    int classes = 0;
    double p_intra = 0.0;
    double p_inter = 0.0;
    int feature_dim = 0;
    double feature_noise = 0.0;
};

/// Balanced stochastic block model; features are orthogonal one-hot-like
/// class means plus Gaussian noise. Every node comes out labelled Original.
std::pair<Graph, LabelState> generate_sbm(const SbmParams& params, uint64_t seed);

/// Fraction of `mask` nodes whose argmax prediction equals `labels[v]`;
/// nodes with unknown label (-1) are skipped.
double accuracy(const Matrix& probs, const std::vector<int>& labels, const std::vector<int>& mask);

}  // namespace bonnc
