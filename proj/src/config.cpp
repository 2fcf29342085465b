#include "bonnc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bonnc {

using nlohmann::json;

RunMode parse_mode(const std::string& name) {
    if (name == "bonnc") return RunMode::Bonnc;
    if (name == "gcn-baseline") return RunMode::GcnBaseline;
    if (name == "mean-fusion") return RunMode::MeanFusion;
    if (name == "coattention-off-ablation") return RunMode::CoattentionOffAblation;
    if (name == "no-label-improve-ablation") return RunMode::NoLabelImproveAblation;
    if (name == "single-teacher") return RunMode::SingleTeacher;
    throw ValidationError("unknown mode: " + name);
}

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Bonnc: return "bonnc";
        case RunMode::GcnBaseline: return "gcn-baseline";
        case RunMode::MeanFusion: return "mean-fusion";
        case RunMode::CoattentionOffAblation: return "coattention-off-ablation";
        case RunMode::NoLabelImproveAblation: return "no-label-improve-ablation";
        case RunMode::SingleTeacher: return "single-teacher";
    }
    return "?";
}

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ValidationError("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError("config: bad value for '" + std::string(key) + "': " + e.what());
    }
}

void parse_dataset(const json& obj, DatasetConfig& out) {
    reject_unknown(obj, "dataset",
                   {"kind", "n", "classes", "p_intra", "p_inter", "feature_dim", "feature_noise",
                    "edges", "features", "labels"});
    std::string kind = out.use_sbm ? "sbm" : "files";
    read(obj, "kind", kind);
    if (kind == "sbm") {
        out.use_sbm = true;
        read(obj, "n", out.sbm.n);
        read(obj, "classes", out.sbm.classes);
        read(obj, "p_intra", out.sbm.p_intra);
        read(obj, "p_inter", out.sbm.p_inter);
        read(obj, "feature_dim", out.sbm.feature_dim);
        read(obj, "feature_noise", out.sbm.feature_noise);
    } else if (kind == "files") {
        out.use_sbm = false;
        read(obj, "edges", out.edge_file);
        read(obj, "features", out.feature_file);
        read(obj, "labels", out.label_file);
        read(obj, "classes", out.classes);
    } else {
        throw ValidationError("config: dataset.kind must be 'sbm' or 'files'");
    }
}

void parse_noise(const json& obj, NoiseConfig& out) {
    reject_unknown(obj, "noise", {"kind", "rate", "pair_map"});
    std::string kind = out.kind == NoiseKind::Uniform ? "uniform" : "pair";
    read(obj, "kind", kind);
    if (kind == "uniform")
        out.kind = NoiseKind::Uniform;
    else if (kind == "pair")
        out.kind = NoiseKind::Pair;
    else
        throw ValidationError("config: noise.kind must be 'uniform' or 'pair'");
    read(obj, "rate", out.rate);
    read(obj, "pair_map", out.pair_map);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("config: top level must be an object");
    reject_unknown(root, "top level",
                   {"mode", "seeds", "rounds", "dataset", "noise", "splits", "teachers", "student",
                    "bilevel", "cleanselect", "labelimprove", "baseline"});

    RunConfig cfg;
    if (root.contains("mode")) cfg.mode = parse_mode(root.at("mode").get<std::string>());
    read(root, "seeds", cfg.seeds);
    read(root, "rounds", cfg.rounds);

    if (root.contains("dataset")) parse_dataset(root.at("dataset"), cfg.dataset);
    if (root.contains("noise")) parse_noise(root.at("noise"), cfg.noise);
    if (root.contains("splits")) {
        const json& obj = root.at("splits");
        reject_unknown(obj, "splits", {"train", "val", "test"});
        read(obj, "train", cfg.splits.train);
        read(obj, "val", cfg.splits.val);
        read(obj, "test", cfg.splits.test);
    }
    if (root.contains("teachers")) {
        const json& obj = root.at("teachers");
        reject_unknown(obj, "teachers",
                       {"embed_dim", "encoder_epochs", "encoder_lr", "classifier_epochs", "classifier_lr"});
        read(obj, "embed_dim", cfg.teachers.embed_dim);
        read(obj, "encoder_epochs", cfg.teachers.encoder_epochs);
        read(obj, "encoder_lr", cfg.teachers.encoder_lr);
        read(obj, "classifier_epochs", cfg.teachers.classifier_epochs);
        read(obj, "classifier_lr", cfg.teachers.classifier_lr);
    }
    if (root.contains("student")) {
        const json& obj = root.at("student");
        reject_unknown(obj, "student", {"hidden", "dropout"});
        read(obj, "hidden", cfg.student.hidden);
        read(obj, "dropout", cfg.student.dropout);
    }
    if (root.contains("bilevel")) {
        const json& obj = root.at("bilevel");
        reject_unknown(obj, "bilevel",
                       {"window_length", "windows", "eta_mu", "eta_lr_upper", "w_init", "warm_start"});
        read(obj, "window_length", cfg.bilevel.window_length);
        read(obj, "windows", cfg.bilevel.windows);
        read(obj, "eta_mu", cfg.bilevel.eta_mu);
        read(obj, "eta_lr_upper", cfg.bilevel.eta_lr_upper);
        read(obj, "w_init", cfg.bilevel.w_init);
        read(obj, "warm_start", cfg.bilevel.warm_start);
    }
    if (root.contains("cleanselect")) {
        const json& obj = root.at("cleanselect");
        reject_unknown(obj, "cleanselect", {"beta1", "beta2", "alpha"});
        read(obj, "beta1", cfg.cleanselect.beta1);
        read(obj, "beta2", cfg.cleanselect.beta2);
        read(obj, "alpha", cfg.cleanselect.alpha);
    }
    if (root.contains("labelimprove")) {
        const json& obj = root.at("labelimprove");
        reject_unknown(obj, "labelimprove", {"r", "rho"});
        read(obj, "r", cfg.labelimprove.r);
        read(obj, "rho", cfg.labelimprove.rho);
    }
    if (root.contains("baseline")) {
        const json& obj = root.at("baseline");
        reject_unknown(obj, "baseline", {"epochs", "lr", "weight_decay", "patience"});
        read(obj, "epochs", cfg.baseline.epochs);
        read(obj, "lr", cfg.baseline.lr);
        read(obj, "weight_decay", cfg.baseline.weight_decay);
        read(obj, "patience", cfg.baseline.patience);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void RunConfig::validate() const {
    if (seeds.empty()) throw ValidationError("config: at least one seed required");
    if (rounds < 1) throw ValidationError("config: rounds must be >= 1");

    if (dataset.use_sbm) {
        if (dataset.sbm.n <= 0 || dataset.sbm.classes < 2)
            throw ValidationError("config: sbm needs n > 0 and classes >= 2");
        if (!(0.0 <= dataset.sbm.p_inter && dataset.sbm.p_inter < dataset.sbm.p_intra &&
              dataset.sbm.p_intra <= 1.0))
            throw ValidationError("config: sbm needs 0 <= p_inter < p_intra <= 1");
        if (dataset.sbm.feature_dim <= 0 || dataset.sbm.feature_noise < 0.0)
            throw ValidationError("config: sbm needs feature_dim > 0 and feature_noise >= 0");
    } else {
        if (dataset.edge_file.empty() || dataset.feature_file.empty() || dataset.label_file.empty())
            throw ValidationError("config: file dataset needs edges, features and labels paths");
        if (dataset.classes < 0) throw ValidationError("config: classes must be >= 0");
    }

    if (noise.rate < 0.0 || noise.rate > 1.0)
        throw ValidationError("config: noise.rate must lie in [0,1]");

    const double frs[3] = {splits.train, splits.val, splits.test};
    double total = 0.0;
    for (double f : frs) {
        if (f <= 0.0 || f > 1.0) throw ValidationError("config: split fractions must lie in (0,1]");
        total += f;
    }
    if (total > 1.0 + 1e-12) throw ValidationError("config: split fractions sum beyond 1");

    if (teachers.embed_dim <= 0 || teachers.encoder_epochs < 0 || teachers.classifier_epochs < 0 ||
        teachers.encoder_lr <= 0.0 || teachers.classifier_lr <= 0.0)
        throw ValidationError("config: teacher parameters out of range");
    if (student.hidden <= 0 || student.dropout < 0.0 || student.dropout >= 1.0)
        throw ValidationError("config: student parameters out of range");
    if (bilevel.window_length < 1 || bilevel.windows < 0 || bilevel.eta_mu <= 0.0 ||
        bilevel.eta_lr_upper <= 0.0)
        throw ValidationError("config: bilevel parameters out of range");
    if (cleanselect.beta1 < 1 || cleanselect.beta2 < 0 || cleanselect.alpha < 0.0 ||
        cleanselect.alpha > 100.0)
        throw ValidationError("config: cleanselect parameters out of range");
    if (labelimprove.r < 0.0 || labelimprove.r >= 1.0 || labelimprove.rho < 0)
        throw ValidationError("config: labelimprove parameters out of range");
    if (baseline.epochs < 1 || baseline.lr <= 0.0 || baseline.weight_decay < 0.0 || baseline.patience < 0)
        throw ValidationError("config: baseline parameters out of range");
}

void set_parameter(RunConfig& cfg, const std::string& name, double value) {
    const auto as_int = [&](const char* what) {
        const double rounded = std::round(value);
        if (std::abs(rounded - value) > 1e-9)
            throw ValidationError(std::string("sweep: ") + what + " expects an integer, got " +
                                  std::to_string(value));
        return static_cast<int>(rounded);
    };
    if (name == "r")
        cfg.labelimprove.r = value;
    else if (name == "rho")
        cfg.labelimprove.rho = as_int("rho");
    else if (name == "beta1")
        cfg.cleanselect.beta1 = as_int("beta1");
    else if (name == "beta2")
        cfg.cleanselect.beta2 = as_int("beta2");
    else if (name == "alpha")
        cfg.cleanselect.alpha = value;
    else if (name == "t" || name == "window_length")
        cfg.bilevel.window_length = as_int("window_length");
    else if (name == "windows")
        cfg.bilevel.windows = as_int("windows");
    else if (name == "eta_mu")
        cfg.bilevel.eta_mu = value;
    else if (name == "eta_lr_upper")
        cfg.bilevel.eta_lr_upper = value;
    else if (name == "rounds")
        cfg.rounds = as_int("rounds");
    else if (name == "noise_rate")
        cfg.noise.rate = value;
    else
        throw ValidationError("sweep: unknown parameter '" + name + "'");
    cfg.validate();
}

}  // namespace bonnc
