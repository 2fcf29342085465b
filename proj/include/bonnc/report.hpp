#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bonnc/bilevel.hpp"
#include "bonnc/config.hpp"

namespace bonnc {

/// Label-quality bookkeeping for one outer round, measured after that
/// round's label improvement.
struct RoundRecord {
    int round = 0;
    int supervising = 0;          // supervising nodes after the round
    double label_accuracy = 0.0;  // fraction of supervising labels matching ground truth
    int clean_size = 0;
    int removed = 0;
    double filter_precision = 0.0;  // removed nodes whose label was truly wrong; NaN if none removed
    int pseudo_added = 0;
    double pseudo_precision = 0.0;  // added labels matching ground truth; NaN if none added
};

struct AuditRow {
    int round = 0;
    std::string action;  // "removed" or "pseudo"
    int node = -1;
    int label = -1;        // the withdrawn label, or the assigned pseudo label
    std::string source;    // "filter", "student", "teacher" or "both"
    int matches_truth = -1;  // 1/0 against ground truth, -1 unknown
};

struct HistoryRow {
    int round = 0;
    WindowRecord rec;
};

struct SeedResult {
    uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double test_accuracy = 0.0;
    double best_val_accuracy = 0.0;
    double wall_seconds = 0.0;
    std::vector<RoundRecord> rounds;
    std::vector<HistoryRow> history;
    std::vector<AuditRow> audit;
};

struct RunReport {
    RunMode mode = RunMode::Bonnc;
    int teacher_count = 0;  // 0 for the plain-GCN baseline
    int classes = 0;
    std::vector<SeedResult> seeds;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;  // population standard deviation over ok seeds
    double mean_val_accuracy = 0.0;
    double wall_seconds = 0.0;

    bool all_ok() const;
    void aggregate();  // recomputes the mean/std fields from the seed rows
};

/// Writes results.csv (one row per seed plus mean and std rows), report.txt,
/// history.csv, rounds.csv and label_audit.csv under `out_dir`, creating it
/// if needed. Wall times appear only in the text table so the CSVs stay
/// bit-identical across reruns.
void emit_report(const RunReport& report, const std::string& out_dir);

struct SweepRow {
    double value = 0.0;
    RunReport report;
};

struct SweepResult {
    std::string parameter;
    std::vector<SweepRow> rows;
};

/// Writes sweep.csv (one row per grid value) under `out_dir`.
void emit_sweep(const SweepResult& sweep, const std::string& out_dir);

/// Parses a results.csv produced by emit_report; returns (seed label, test
/// accuracy, val accuracy) triples including the aggregate rows. Used by the
/// round-trip checks.
std::vector<std::tuple<std::string, double, double>> parse_results_csv(const std::string& path);

}  // namespace bonnc
