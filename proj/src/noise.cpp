#include "bonnc/noise.hpp"

#include <iostream>

#include "bonnc/rng.hpp"

namespace bonnc {

NoiseSpec build_transition(NoiseKind kind, double p, int c, const std::vector<int>& pair_map) {
    if (c < 2) throw ValidationError("build_transition: need at least 2 classes");
    if (p < 0.0 || p > 1.0) throw ValidationError("build_transition: rate must lie in [0,1]");

    NoiseSpec spec;
    spec.kind = kind;
    spec.rate = p;
    spec.c = c;
    spec.q = Matrix(c, c);

    if (kind == NoiseKind::Uniform) {
        if (!pair_map.empty()) throw ValidationError("build_transition: pair_map only applies to pair noise");
        const double off = p / static_cast<double>(c - 1);
        for (int i = 0; i < c; ++i)
            for (int j = 0; j < c; ++j) spec.q(i, j) = i == j ? 1.0 - p : off;
    } else {
        if (p >= 0.5)
            std::cerr << "warning: pair noise rate " << p
                      << " >= 0.5, the pair class dominates the true class\n";
        std::vector<int> pair(c);
        if (pair_map.empty()) {
            for (int i = 0; i < c; ++i) pair[i] = (i + 1) % c;
        } else {
            if (static_cast<int>(pair_map.size()) != c)
                throw ValidationError("build_transition: pair_map must list one class per class");
            for (int i = 0; i < c; ++i) {
                if (pair_map[i] < 0 || pair_map[i] >= c || pair_map[i] == i)
                    throw ValidationError("build_transition: pair_map entries must be a distinct class in range");
                pair[i] = pair_map[i];
            }
        }
        for (int i = 0; i < c; ++i) {
            spec.q(i, i) = 1.0 - p;
            spec.q(i, pair[i]) += p;
        }
    }
    return spec;
}

std::pair<LabelState, CorruptionRecord> corrupt(const LabelState& labels, const std::vector<int>& mask,
                                                const NoiseSpec& spec, uint64_t seed) {
    if (spec.c != labels.c) throw ValidationError("corrupt: class count mismatch");

    LabelState out = labels;
    CorruptionRecord record;
    Rng rng(derive_seed(seed, 0xC0881));

    std::vector<int> ordered = mask;
    std::sort(ordered.begin(), ordered.end());
    for (int v : ordered) {
        if (v < 0 || v >= labels.n() || labels.label[v] < 0)
            throw ValidationError("corrupt: mask node " + std::to_string(v) + " is not labelled");
        const int y = labels.label[v];
        const double u = rng.uniform();
        double cum = 0.0;
        int drawn = spec.c - 1;
        for (int j = 0; j < spec.c; ++j) {
            cum += spec.q(y, j);
            if (u < cum) {
                drawn = j;
                break;
            }
        }
        out.label[v] = drawn;
        record.node.push_back(v);
        record.clean_label.push_back(y);
        record.noisy_label.push_back(drawn);
    }
    return {std::move(out), std::move(record)};
}

}  // namespace bonnc
