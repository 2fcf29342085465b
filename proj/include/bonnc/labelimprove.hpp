#pragma once

#include <vector>

#include "bonnc/graph.hpp"
#include "bonnc/teachers.hpp"

namespace bonnc {

struct FilterResult {
    LabelState labels;
    std::vector<int> removed;  // ascending node ids set to Filtered
};

/// Per-class removal of the highest-loss supervising labels: class j with
/// delta_j nodes loses exactly min(ceil(delta_j * r), delta_j - 1) nodes
/// (ties by lowest node id), so at least one supervisor per class survives.
FilterResult filter_noisy(const Matrix& student_probs, const LabelState& labels,
                          const std::vector<int>& mask, double r);

struct PseudoCandidate {
    int node = -1;
    int y_hat = -1;
    double confidence = 0.0;
};

/// Among unlabelled/filtered nodes: per predicted class, the rho most
/// confident student predictions (ties by lowest node id).
std::vector<PseudoCandidate> pseudo_select_student(const Matrix& student_probs,
                                                   const LabelState& labels, int rho);

/// Same rule on the summed (unnormalized) teacher predictions; confidence
/// lies in (0, k].
std::vector<PseudoCandidate> pseudo_select_teacher(const TeacherEnsemble& ens,
                                                   const LabelState& labels, int rho);

struct PseudoApplied {
    LabelState labels;
    std::vector<int> added;    // nodes that became Pseudo this round
    std::vector<int> dropped;  // selected by both sources with conflicting labels
};

/// Union of both candidate lists. A node picked by both sources is added
/// once when the labels agree and dropped when they conflict. Added nodes
/// get status Pseudo with the round recorded.
PseudoApplied apply_pseudo(const LabelState& labels, const std::vector<PseudoCandidate>& from_student,
                           const std::vector<PseudoCandidate>& from_teacher, int round);

}  // namespace bonnc
