#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bonnc/graph.hpp"
#include "bonnc/noise.hpp"

namespace bonnc {

enum class RunMode {
    Bonnc,                   // full method
    GcnBaseline,             // plain GCN on the noisy labels
    MeanFusion,              // W frozen at all-ones, no upper steps
    CoattentionOffAblation,  // W frozen and label improvement off
    NoLabelImproveAblation,  // full bilevel, label improvement off
    SingleTeacher,           // k = 1 (first built-in encoder only)
};

RunMode parse_mode(const std::string& name);
const char* to_string(RunMode mode);

struct DatasetConfig {
    bool use_sbm = true;
    SbmParams sbm{600, 3, 0.05, 0.005, 8, 1.0};
    std::string edge_file;
    std::string feature_file;
    std::string label_file;
    int classes = 0;  // 0 infers from the label file
};

struct NoiseConfig {
    NoiseKind kind = NoiseKind::Uniform;
    double rate = 0.0;
    std::vector<int> pair_map;  // optional override
};

struct SplitConfig {
    double train = 0.05;
    double val = 0.10;
    double test = 0.60;
};

struct TeacherConfig {
    int embed_dim = 16;
    int encoder_epochs = 100;
    double encoder_lr = 0.05;
    int classifier_epochs = 300;
    double classifier_lr = 0.05;
};

struct StudentConfig {
    int hidden = 16;
    double dropout = 0.5;  // plain training only; windows always run at 0
};

struct BilevelConfig {
    int window_length = 5;
    int windows = 60;
    double eta_mu = 0.05;
    double eta_lr_upper = 0.5;
    double w_init = 1.0;
    bool warm_start = true;  // carry W and student across outer rounds
};

struct CleanSelectConfig {
    int beta1 = 5;
    int beta2 = 10;
    double alpha = 50.0;  // percent
};

struct LabelImproveConfig {
    double r = 0.4;
    int rho = 10;
};

struct GcnBaselineConfig {
    int epochs = 300;
    double lr = 0.01;
    double weight_decay = 5e-4;
    int patience = 30;
};

struct RunConfig {
    RunMode mode = RunMode::Bonnc;
    std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
    int rounds = 3;

    DatasetConfig dataset;
    NoiseConfig noise;
    SplitConfig splits;
    TeacherConfig teachers;
    StudentConfig student;
    BilevelConfig bilevel;
    CleanSelectConfig cleanselect;
    LabelImproveConfig labelimprove;
    GcnBaselineConfig baseline;

    /// Range-checks every field; throws ValidationError on the first
    /// violation.
    void validate() const;
};

/// Parses a JSON config document. Unknown keys anywhere are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Applies one sweep assignment; `name` must be one of the sweepable
/// parameters (r, rho, beta1, beta2, alpha, t/window_length, windows,
/// eta_mu, eta_lr_upper, rounds, noise_rate).
void set_parameter(RunConfig& cfg, const std::string& name, double value);

}  // namespace bonnc
