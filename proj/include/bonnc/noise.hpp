#pragma once

#include <cstdint>
#include <vector>

#include "bonnc/graph.hpp"
#include "bonnc/linalg.hpp"

namespace bonnc {

enum class NoiseKind : uint8_t { Uniform, Pair };

/// Row-stochastic label transition matrix. Row y gives the distribution the
/// noisy label is drawn from when the clean label is y.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::Uniform;
    double rate = 0.0;
    int c = 0;
    Matrix q;  // c x c
};

/// Builds Q for uniform noise (diagonal 1-p, off-diagonal p/(c-1)) or pair
/// noise (diagonal 1-p, p on the pair class). The default pair map is
/// pair(i) = (i+1) mod c; `pair_map` overrides it. Pair rates >= 0.5 warn on
/// stderr.
NoiseSpec build_transition(NoiseKind kind, double p, int c, const std::vector<int>& pair_map = {});

/// What corrupt() changed; evaluation-only (training code never sees it).
struct CorruptionRecord {
    std::vector<int> node;         // masked nodes, ascending
    std::vector<int> clean_label;
    std::vector<int> noisy_label;

    bool flipped(size_t i) const { return clean_label[i] != noisy_label[i]; }
};

/// Resamples each masked node's label from row Q[y]. Nodes outside the mask
/// are untouched. Deterministic given the seed.
std::pair<LabelState, CorruptionRecord> corrupt(const LabelState& labels, const std::vector<int>& mask,
                                                const NoiseSpec& spec, uint64_t seed);

}  // namespace bonnc
