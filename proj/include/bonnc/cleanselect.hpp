#pragma once

#include <cstdint>
#include <vector>

#include "bonnc/graph.hpp"
#include "bonnc/teachers.hpp"

namespace bonnc {

enum class CleanSource : uint8_t { UnlabelledConsensus, LabelledLowLoss };

struct CleanNode {
    int node = -1;
    int y_hat = -1;
    CleanSource source = CleanSource::UnlabelledConsensus;
};

/// High-confidence nodes supplying the upper-level supervision. Node ids are
/// unique and ascending.
struct CleanNodeSet {
    std::vector<CleanNode> nodes;

    bool empty() const { return nodes.empty(); }
    size_t size() const { return nodes.size(); }
};

/// Unlabelled nodes on which every teacher's (tie-broken) argmax agrees.
std::vector<int> consensus_candidates(const TeacherEnsemble& ens, const std::vector<int>& unlabelled);

/// For each candidate, the summed Euclidean distance to its beta1 nearest
/// same-predicted-class candidates, accumulated per teacher in that teacher's
/// own embedding space. Fewer than beta1 same-class candidates sum over all
/// available.
std::vector<double> embedding_score(const TeacherEnsemble& ens, const std::vector<int>& candidates,
                                    int beta1);

/// Per predicted class, the beta2 candidates with the smallest score (ties to
/// the lowest node id); the clean label is the consensus class.
std::vector<CleanNode> select_clean_unlabelled(const TeacherEnsemble& ens,
                                               const std::vector<int>& candidates,
                                               const std::vector<double>& scores, int beta2);

/// Per labelled class, the ceil(alpha% * class size) supervising nodes of the
/// mask with the lowest summed teacher loss; the clean label is the node's
/// current (possibly noisy) label.
std::vector<CleanNode> select_clean_labelled(const TeacherEnsemble& ens, const LabelState& labels,
                                             const std::vector<int>& mask, double alpha_percent);

/// Union of the two parts; a node present in both keeps its labelled-lowloss
/// entry.
CleanNodeSet build_clean_set(const std::vector<CleanNode>& unlabelled_part,
                             const std::vector<CleanNode>& labelled_part);

}  // namespace bonnc
