#include "bonnc/cleanselect.hpp"

#include <algorithm>
#include <cmath>

namespace bonnc {

std::vector<int> consensus_candidates(const TeacherEnsemble& ens, const std::vector<int>& unlabelled) {
    if (ens.k() < 1) throw ArgumentError("consensus_candidates: empty ensemble");
    std::vector<int> out;
    for (int v : unlabelled) {
        const int first = ens.predicted_class(0, v);
        bool agree = true;
        for (int j = 1; j < ens.k() && agree; ++j) agree = ens.predicted_class(j, v) == first;
        if (agree) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

double euclidean(const Matrix& h, int a, int b) {
    double acc = 0.0;
    for (int j = 0; j < h.cols(); ++j) {
        const double diff = h(a, j) - h(b, j);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

}  // namespace

std::vector<double> embedding_score(const TeacherEnsemble& ens, const std::vector<int>& candidates,
                                    int beta1) {
    if (beta1 < 1) throw ValidationError("embedding_score: beta1 must be >= 1");
    if (candidates.empty()) throw ArgumentError("embedding_score: empty candidate set");

    std::vector<int> predicted(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i)
        predicted[i] = ens.predicted_class(0, candidates[i]);

    std::vector<double> xi(candidates.size(), 0.0);
    std::vector<double> dists;
    for (int j = 0; j < ens.k(); ++j) {
        const Matrix& h = ens.teachers[j].h;
        for (size_t i = 0; i < candidates.size(); ++i) {
            dists.clear();
            for (size_t u = 0; u < candidates.size(); ++u) {
                if (u == i || predicted[u] != predicted[i]) continue;
                dists.push_back(euclidean(h, candidates[i], candidates[u]));
            }
            const size_t take = std::min<size_t>(dists.size(), static_cast<size_t>(beta1));
            std::partial_sort(dists.begin(), dists.begin() + take, dists.end());
            for (size_t t = 0; t < take; ++t) xi[i] += dists[t];
        }
    }
    return xi;
}

std::vector<CleanNode> select_clean_unlabelled(const TeacherEnsemble& ens,
                                               const std::vector<int>& candidates,
                                               const std::vector<double>& scores, int beta2) {
    if (beta2 < 0) throw ValidationError("select_clean_unlabelled: beta2 must be >= 0");
    if (candidates.size() != scores.size())
        throw DimensionError("select_clean_unlabelled: one score per candidate required");

    const int c = ens.classes();
    std::vector<std::vector<std::pair<double, int>>> per_class(c);  // (score, node)
    for (size_t i = 0; i < candidates.size(); ++i)
        per_class[ens.predicted_class(0, candidates[i])].push_back({scores[i], candidates[i]});

    std::vector<CleanNode> out;
    for (int cls = 0; cls < c; ++cls) {
        auto& bucket = per_class[cls];
        std::sort(bucket.begin(), bucket.end());  // score asc, then node id asc
        const size_t take = std::min<size_t>(bucket.size(), static_cast<size_t>(beta2));
        for (size_t t = 0; t < take; ++t)
            out.push_back({bucket[t].second, cls, CleanSource::UnlabelledConsensus});
    }
    std::sort(out.begin(), out.end(), [](const CleanNode& a, const CleanNode& b) { return a.node < b.node; });
    return out;
}

std::vector<CleanNode> select_clean_labelled(const TeacherEnsemble& ens, const LabelState& labels,
                                             const std::vector<int>& mask, double alpha_percent) {
    if (alpha_percent < 0.0 || alpha_percent > 100.0)
        throw ValidationError("select_clean_labelled: alpha must lie in [0,100]");

    std::vector<std::vector<std::pair<double, int>>> per_class(labels.c);  // (loss, node)
    for (int v : labels.supervising_nodes(mask)) {
        double loss = 0.0;
        for (int j = 0; j < ens.k(); ++j)
            loss -= std::log(std::max(ens.teachers[j].p(v, labels.label[v]), kLogClamp));
        per_class[labels.label[v]].push_back({loss, v});
    }

    std::vector<CleanNode> out;
    for (int cls = 0; cls < labels.c; ++cls) {
        auto& bucket = per_class[cls];
        std::sort(bucket.begin(), bucket.end());  // loss asc, then node id asc
        const size_t take =
            static_cast<size_t>(std::ceil(alpha_percent / 100.0 * static_cast<double>(bucket.size())));
        for (size_t t = 0; t < std::min(take, bucket.size()); ++t)
            out.push_back({bucket[t].second, cls, CleanSource::LabelledLowLoss});
    }
    std::sort(out.begin(), out.end(), [](const CleanNode& a, const CleanNode& b) { return a.node < b.node; });
    return out;
}

CleanNodeSet build_clean_set(const std::vector<CleanNode>& unlabelled_part,
                             const std::vector<CleanNode>& labelled_part) {
    CleanNodeSet set;
    set.nodes = labelled_part;  // labelled entries win on overlap
    for (const CleanNode& cand : unlabelled_part) {
        const bool taken = std::any_of(labelled_part.begin(), labelled_part.end(),
                                       [&](const CleanNode& n) { return n.node == cand.node; });
        if (!taken) set.nodes.push_back(cand);
    }
    std::sort(set.nodes.begin(), set.nodes.end(),
              [](const CleanNode& a, const CleanNode& b) { return a.node < b.node; });
    return set;
}

}  // namespace bonnc
