#include "bonnc/labelimprove.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bonnc {

FilterResult filter_noisy(const Matrix& student_probs, const LabelState& labels,
                          const std::vector<int>& mask, double r) {
    if (r < 0.0 || r >= 1.0) throw ValidationError("filter_noisy: r must lie in [0,1)");

    std::vector<std::vector<std::pair<double, int>>> per_class(labels.c);  // (loss, node)
    for (int v : labels.supervising_nodes(mask)) {
        const double loss = -std::log(std::max(student_probs(v, labels.label[v]), kLogClamp));
        per_class[labels.label[v]].push_back({loss, v});
    }

    FilterResult out;
    out.labels = labels;
    for (int cls = 0; cls < labels.c; ++cls) {
        auto& bucket = per_class[cls];
        if (bucket.empty()) continue;
        const size_t count = bucket.size();
        const size_t requested = static_cast<size_t>(std::ceil(static_cast<double>(count) * r));
        const size_t remove = std::min(requested, count - 1);  // keep one supervisor per class
        // loss descending, ties to the lowest node id
        std::sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (size_t i = 0; i < remove; ++i) {
            out.labels.status[bucket[i].second] = NodeStatus::Filtered;
            out.removed.push_back(bucket[i].second);
        }
    }
    std::sort(out.removed.begin(), out.removed.end());
    return out;
}

namespace {

bool pseudo_eligible(const LabelState& labels, int v) {
    return labels.status[v] == NodeStatus::Unlabelled || labels.status[v] == NodeStatus::Filtered;
}

std::vector<PseudoCandidate> top_rho_per_class(std::vector<std::vector<PseudoCandidate>>& per_class,
                                               int rho) {
    std::vector<PseudoCandidate> out;
    for (auto& bucket : per_class) {
        // confidence descending, ties to the lowest node id
        std::sort(bucket.begin(), bucket.end(), [](const PseudoCandidate& a, const PseudoCandidate& b) {
            if (a.confidence != b.confidence) return a.confidence > b.confidence;
            return a.node < b.node;
        });
        const size_t take = std::min<size_t>(bucket.size(), static_cast<size_t>(rho));
        for (size_t i = 0; i < take; ++i) out.push_back(bucket[i]);
    }
    std::sort(out.begin(), out.end(),
              [](const PseudoCandidate& a, const PseudoCandidate& b) { return a.node < b.node; });
    return out;
}

}  // namespace

std::vector<PseudoCandidate> pseudo_select_student(const Matrix& student_probs,
                                                   const LabelState& labels, int rho) {
    if (rho < 0) throw ValidationError("pseudo_select_student: rho must be >= 0");
    std::vector<std::vector<PseudoCandidate>> per_class(labels.c);
    for (int v = 0; v < labels.n(); ++v) {
        if (!pseudo_eligible(labels, v)) continue;
        const int y_hat = argmax_row(student_probs, v);
        per_class[y_hat].push_back({v, y_hat, student_probs(v, y_hat)});
    }
    return top_rho_per_class(per_class, rho);
}

std::vector<PseudoCandidate> pseudo_select_teacher(const TeacherEnsemble& ens,
                                                   const LabelState& labels, int rho) {
    if (rho < 0) throw ValidationError("pseudo_select_teacher: rho must be >= 0");
    std::vector<std::vector<PseudoCandidate>> per_class(labels.c);
    for (int v = 0; v < labels.n(); ++v) {
        if (!pseudo_eligible(labels, v)) continue;
        double best = -1.0;
        int y_hat = 0;
        for (int cc = 0; cc < labels.c; ++cc) {
            double sum = 0.0;
            for (int j = 0; j < ens.k(); ++j) sum += ens.teachers[j].p(v, cc);
            if (sum > best) {
                best = sum;
                y_hat = cc;
            }
        }
        per_class[y_hat].push_back({v, y_hat, best});
    }
    return top_rho_per_class(per_class, rho);
}

PseudoApplied apply_pseudo(const LabelState& labels, const std::vector<PseudoCandidate>& from_student,
                           const std::vector<PseudoCandidate>& from_teacher, int round) {
    std::map<int, int> chosen;  // node -> label, -1 marks a conflict
    for (const auto& cand : from_student) {
        if (!pseudo_eligible(labels, cand.node))
            throw ArgumentError("apply_pseudo: candidate " + std::to_string(cand.node) +
                                " is not unlabelled or filtered");
        chosen[cand.node] = cand.y_hat;
    }
    for (const auto& cand : from_teacher) {
        if (!pseudo_eligible(labels, cand.node))
            throw ArgumentError("apply_pseudo: candidate " + std::to_string(cand.node) +
                                " is not unlabelled or filtered");
        auto it = chosen.find(cand.node);
        if (it == chosen.end())
            chosen[cand.node] = cand.y_hat;
        else if (it->second != cand.y_hat)
            it->second = -1;
    }

    PseudoApplied out;
    out.labels = labels;
    for (const auto& [node, y_hat] : chosen) {
        if (y_hat < 0) {
            out.dropped.push_back(node);
            continue;
        }
        out.labels.label[node] = y_hat;
        out.labels.status[node] = NodeStatus::Pseudo;
        out.labels.pseudo_round[node] = round;
        out.added.push_back(node);
    }
    return out;
}

}  // namespace bonnc
