#include "bonnc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <tuple>

#include "bonnc/labelimprove.hpp"
#include "bonnc/noise.hpp"
#include "bonnc/rng.hpp"
#include "bonnc/student.hpp"

namespace bonnc {

namespace {

// seed streams, one per pipeline stage
enum SeedStream : uint64_t {
    kDataStream = 1,
    kSplitStream = 2,
    kNoiseStream = 3,
    kBaselineStream = 4,
    kEncoderBuildStream = 5,
    kEncoderFitStream = 6,
    kStudentInitStream = 7,
};

struct ModeSwitches {
    bool plain_gcn = false;
    bool update_w = true;
    bool label_improve = true;
    int teacher_count = 3;
};

ModeSwitches switches_for(RunMode mode) {
    ModeSwitches s;
    switch (mode) {
        case RunMode::Bonnc: break;
        case RunMode::GcnBaseline: s.plain_gcn = true; break;
        case RunMode::MeanFusion: s.update_w = false; break;
        case RunMode::CoattentionOffAblation:
            s.update_w = false;
            s.label_improve = false;
            break;
        case RunMode::NoLabelImproveAblation: s.label_improve = false; break;
        case RunMode::SingleTeacher: s.teacher_count = 1; break;
    }
    return s;
}

double match_fraction(const std::vector<int>& nodes, const std::vector<int>& got,
                      const GroundTruth& gt) {
    int hit = 0, seen = 0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (gt.label[nodes[i]] < 0) continue;
        ++seen;
        if (got[i] == gt.label[nodes[i]]) ++hit;
    }
    return seen == 0 ? std::nan("") : static_cast<double>(hit) / seen;
}

SeedResult run_one_seed(const RunConfig& cfg, uint64_t seed) {
    SeedResult result;
    result.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const ModeSwitches sw = switches_for(cfg.mode);

    // dataset
    Graph graph;
    LabelState full_labels;
    if (cfg.dataset.use_sbm) {
        std::tie(graph, full_labels) = generate_sbm(cfg.dataset.sbm, derive_seed(seed, kDataStream));
    } else {
        std::tie(graph, full_labels) = load_graph(cfg.dataset.edge_file, cfg.dataset.feature_file,
                                                  cfg.dataset.label_file, cfg.dataset.classes);
    }
    const GroundTruth gt = GroundTruth::from_labels(full_labels);
    const SplitMasks masks =
        make_splits(full_labels, cfg.splits.train, cfg.splits.val, cfg.splits.test,
                    derive_seed(seed, kSplitStream));

    // only the training split keeps labels; everything else is unlabelled for
    // the training path (ground truth stays with the runner)
    LabelState labels = full_labels.restricted_to(masks.train);
    const NoiseSpec noise_spec =
        build_transition(cfg.noise.kind, cfg.noise.rate, labels.c, cfg.noise.pair_map);
    CorruptionRecord corruption;
    std::tie(labels, corruption) = corrupt(labels, masks.train, noise_spec,
                                           derive_seed(seed, kNoiseStream));

    if (sw.plain_gcn) {
        const BaselineConfig bcfg{cfg.baseline.epochs, cfg.baseline.lr, cfg.baseline.weight_decay,
                                  cfg.baseline.patience};
        const BaselineResult res =
            train_baseline_gcn(graph, labels, masks.train, masks.validation, gt.label,
                               cfg.student.hidden, cfg.student.dropout, bcfg,
                               derive_seed(seed, kBaselineStream));
        const StudentForward eval = student_forward(res.params, graph, false, 0);
        result.test_accuracy = accuracy(eval.p, gt.label, masks.test);
        result.best_val_accuracy = res.best_val_accuracy;
        result.ok = true;
        result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return result;
    }

    // teachers: encoders fit once per seed, label-free
    const EncoderConfig ecfg{cfg.teachers.encoder_epochs, cfg.teachers.encoder_lr};
    auto encoders = builtin_encoders(cfg.teachers.embed_dim, derive_seed(seed, kEncoderBuildStream), ecfg);
    encoders.resize(sw.teacher_count);
    for (auto& enc : encoders) enc->fit(graph, derive_seed(seed, kEncoderFitStream));

    StudentParams student = init_params(graph.d, cfg.student.hidden, labels.c,
                                        derive_seed(seed, kStudentInitStream));
    TeacherWeightMatrix weight(sw.teacher_count, labels.c, cfg.bilevel.w_init, cfg.bilevel.eta_lr_upper);

    StudentParams best_student = student;
    double best_val = -1.0;

    for (int round = 0; round < cfg.rounds; ++round) {
        if (!cfg.bilevel.warm_start) {
            student = init_params(graph.d, cfg.student.hidden, labels.c,
                                  derive_seed(seed, derive_seed(kStudentInitStream, round)));
            weight = TeacherWeightMatrix(sw.teacher_count, labels.c, cfg.bilevel.w_init,
                                         cfg.bilevel.eta_lr_upper);
        }

        // classifiers retrain on the current labels; embeddings never change
        const std::vector<int> supervising = labels.supervising_nodes();
        std::vector<Matrix> classifiers;
        for (auto& enc : encoders)
            classifiers.push_back(train_classifier(enc->embed(graph), labels, supervising,
                                                   cfg.teachers.classifier_epochs,
                                                   cfg.teachers.classifier_lr));
        const TeacherEnsemble ens = ensemble_predict(encoders, classifiers, graph);

        // clean set: consensus unlabelled plus low-loss labelled
        std::vector<int> unlabelled;
        for (int v = 0; v < labels.n(); ++v)
            if (labels.status[v] == NodeStatus::Unlabelled || labels.status[v] == NodeStatus::Filtered)
                unlabelled.push_back(v);
        std::vector<CleanNode> part_unlabelled;
        const std::vector<int> candidates = consensus_candidates(ens, unlabelled);
        if (!candidates.empty()) {
            const std::vector<double> xi = embedding_score(ens, candidates, cfg.cleanselect.beta1);
            part_unlabelled = select_clean_unlabelled(ens, candidates, xi, cfg.cleanselect.beta2);
        }
        const std::vector<CleanNode> part_labelled =
            select_clean_labelled(ens, labels, supervising, cfg.cleanselect.alpha);
        const CleanNodeSet clean = build_clean_set(part_unlabelled, part_labelled);

        DistillationConfig dcfg;
        dcfg.window_length = cfg.bilevel.window_length;
        dcfg.windows = cfg.bilevel.windows;
        dcfg.eta_mu = cfg.bilevel.eta_mu;
        dcfg.eta_lr_upper = cfg.bilevel.eta_lr_upper;
        dcfg.update_w = sw.update_w;
        dcfg.val_mask = masks.validation;
        dcfg.val_labels = gt.label;

        DistillationResult dres =
            run_distillation(ens, graph, labels, clean, student, weight, dcfg);
        student = dres.student;
        weight = dres.w;
        for (const WindowRecord& rec : dres.history) result.history.push_back({round, rec});
        if (dres.best_val_accuracy > best_val) {
            best_val = dres.best_val_accuracy;
            best_student = dres.best_student;
        }

        RoundRecord rr;
        rr.round = round;
        rr.clean_size = static_cast<int>(clean.size());

        if (sw.label_improve) {
            const StudentForward pred = student_forward(student, graph, false, 0);

            FilterResult fr = filter_noisy(pred.p, labels, labels.supervising_nodes(), cfg.labelimprove.r);
            int removed_wrong = 0;
            for (int v : fr.removed) {
                const int was = labels.label[v];
                const int truth = gt.label[v];
                const int matches = truth < 0 ? -1 : (was == truth ? 1 : 0);
                if (matches == 0) ++removed_wrong;
                result.audit.push_back({round, "removed", v, was, "filter", matches});
            }
            rr.removed = static_cast<int>(fr.removed.size());
            rr.filter_precision = fr.removed.empty()
                                      ? std::nan("")
                                      : static_cast<double>(removed_wrong) / fr.removed.size();
            labels = std::move(fr.labels);

            const auto cands_student = pseudo_select_student(pred.p, labels, cfg.labelimprove.rho);
            const auto cands_teacher = pseudo_select_teacher(ens, labels, cfg.labelimprove.rho);
            PseudoApplied pa = apply_pseudo(labels, cands_student, cands_teacher, round);
            int pseudo_right = 0;
            for (int v : pa.added) {
                const int truth = gt.label[v];
                const int matches = truth < 0 ? -1 : (pa.labels.label[v] == truth ? 1 : 0);
                if (matches == 1) ++pseudo_right;
                std::string source = "both";
                const bool from_student = std::any_of(cands_student.begin(), cands_student.end(),
                                                      [&](const auto& cc) { return cc.node == v; });
                const bool from_teacher = std::any_of(cands_teacher.begin(), cands_teacher.end(),
                                                      [&](const auto& cc) { return cc.node == v; });
                if (from_student && !from_teacher) source = "student";
                if (!from_student && from_teacher) source = "teacher";
                result.audit.push_back({round, "pseudo", v, pa.labels.label[v], source, matches});
            }
            rr.pseudo_added = static_cast<int>(pa.added.size());
            rr.pseudo_precision = pa.added.empty()
                                      ? std::nan("")
                                      : static_cast<double>(pseudo_right) / pa.added.size();
            labels = std::move(pa.labels);
        } else {
            rr.filter_precision = std::nan("");
            rr.pseudo_precision = std::nan("");
        }

        const std::vector<int> now_supervising = labels.supervising_nodes();
        rr.supervising = static_cast<int>(now_supervising.size());
        std::vector<int> current(now_supervising.size());
        for (size_t i = 0; i < now_supervising.size(); ++i) current[i] = labels.label[now_supervising[i]];
        rr.label_accuracy = match_fraction(now_supervising, current, gt);
        result.rounds.push_back(rr);
    }

    const StudentForward eval = student_forward(best_student, graph, false, 0);
    result.test_accuracy = accuracy(eval.p, gt.label, masks.test);
    result.best_val_accuracy = best_val;
    result.ok = true;
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace

RunReport run_experiment(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    RunReport report;
    report.mode = cfg.mode;
    report.teacher_count = switches_for(cfg.mode).plain_gcn ? 0 : switches_for(cfg.mode).teacher_count;
    report.classes = cfg.dataset.use_sbm ? cfg.dataset.sbm.classes : cfg.dataset.classes;

    for (uint64_t seed : cfg.seeds) {
        try {
            report.seeds.push_back(run_one_seed(cfg, seed));
        } catch (const std::exception& e) {
            SeedResult failed;
            failed.seed = seed;
            failed.ok = false;
            failed.error = e.what();
            failed.test_accuracy = std::nan("");
            failed.best_val_accuracy = std::nan("");
            report.seeds.push_back(std::move(failed));
        }
    }
    if (report.classes == 0)  // file dataset with inferred class count
        for (const SeedResult& s : report.seeds)
            if (!s.history.empty()) {
                report.classes = s.history.front().rec.w_snapshot.cols();
                break;
            }
    report.aggregate();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SweepResult run_sweep(const RunConfig& cfg, const std::string& parameter,
                      const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("run_sweep: empty grid");
    SweepResult sweep;
    sweep.parameter = parameter;
    for (double value : grid) {
        RunConfig variant = cfg;
        set_parameter(variant, parameter, value);  // validates the name and range
        sweep.rows.push_back({value, run_experiment(variant)});
    }
    return sweep;
}

}  // namespace bonnc
