#include "bonnc/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace bonnc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

}  // namespace

bool RunReport::all_ok() const {
    for (const SeedResult& s : seeds)
        if (!s.ok) return false;
    return !seeds.empty();
}

void RunReport::aggregate() {
    double sum = 0.0, sum_val = 0.0;
    int n = 0;
    for (const SeedResult& s : seeds) {
        if (!s.ok) continue;
        sum += s.test_accuracy;
        sum_val += s.best_val_accuracy;
        ++n;
    }
    if (n == 0) {
        mean_test_accuracy = std_test_accuracy = mean_val_accuracy = std::nan("");
        return;
    }
    mean_test_accuracy = sum / n;
    mean_val_accuracy = sum_val / n;
    double sq = 0.0;
    for (const SeedResult& s : seeds) {
        if (!s.ok) continue;
        const double d = s.test_accuracy - mean_test_accuracy;
        sq += d * d;
    }
    std_test_accuracy = std::sqrt(sq / n);
}

void emit_report(const RunReport& report, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    const std::filesystem::path dir(out_dir);

    {
        auto out = open_out(dir / "results.csv");
        out << "seed,status,test_accuracy,best_val_accuracy\n";
        for (const SeedResult& s : report.seeds)
            out << s.seed << "," << (s.ok ? "ok" : "error") << "," << fmt(s.test_accuracy) << ","
                << fmt(s.best_val_accuracy) << "\n";
        out << "mean,aggregate," << fmt(report.mean_test_accuracy) << ","
            << fmt(report.mean_val_accuracy) << "\n";
        out << "std,aggregate," << fmt(report.std_test_accuracy) << ",\n";
    }

    {
        auto out = open_out(dir / "history.csv");
        out << "seed,round,window,lower_loss,upper_loss,val_accuracy";
        const int k = report.teacher_count;
        const int c = report.classes;
        for (int j = 0; j < k; ++j)
            for (int cc = 0; cc < c; ++cc) out << ",w_" << j << "_" << cc;
        out << "\n";
        for (const SeedResult& s : report.seeds) {
            for (const HistoryRow& row : s.history) {
                out << s.seed << "," << row.round << "," << row.rec.window << ","
                    << fmt(row.rec.lower_loss) << "," << fmt(row.rec.upper_loss) << ","
                    << fmt(row.rec.val_accuracy);
                for (double w : row.rec.w_snapshot.data()) out << "," << fmt(w);
                out << "\n";
            }
        }
    }

    {
        auto out = open_out(dir / "rounds.csv");
        out << "seed,round,supervising,label_accuracy,clean_size,removed,filter_precision,"
               "pseudo_added,pseudo_precision\n";
        for (const SeedResult& s : report.seeds)
            for (const RoundRecord& r : s.rounds)
                out << s.seed << "," << r.round << "," << r.supervising << ","
                    << fmt(r.label_accuracy) << "," << r.clean_size << "," << r.removed << ","
                    << fmt(r.filter_precision) << "," << r.pseudo_added << ","
                    << fmt(r.pseudo_precision) << "\n";
    }

    {
        auto out = open_out(dir / "label_audit.csv");
        out << "seed,round,action,node,label,source,matches_truth\n";
        for (const SeedResult& s : report.seeds)
            for (const AuditRow& a : s.audit)
                out << s.seed << "," << a.round << "," << a.action << "," << a.node << "," << a.label
                    << "," << a.source << "," << a.matches_truth << "\n";
    }

    {
        auto out = open_out(dir / "report.txt");
        out << "mode: " << to_string(report.mode) << "\n";
        out << "seeds: " << report.seeds.size() << "\n\n";
        out << "  seed      status   test_acc    val_acc    wall_s\n";
        for (const SeedResult& s : report.seeds) {
            char line[160];
            std::snprintf(line, sizeof(line), "%6llu  %10s  %9s  %9s  %8.2f\n",
                          static_cast<unsigned long long>(s.seed), s.ok ? "ok" : "error",
                          fmt_short(s.test_accuracy).c_str(), fmt_short(s.best_val_accuracy).c_str(),
                          s.wall_seconds);
            out << line;
            if (!s.ok) out << "        error: " << s.error << "\n";
        }
        char tail[160];
        std::snprintf(tail, sizeof(tail), "\n  mean %s  std %s  total wall %.2f s\n",
                      fmt_short(report.mean_test_accuracy).c_str(),
                      fmt_short(report.std_test_accuracy).c_str(), report.wall_seconds);
        out << tail;
    }
}

void emit_sweep(const SweepResult& sweep, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    auto out = open_out(std::filesystem::path(out_dir) / "sweep.csv");
    out << "parameter,value,mean_test_accuracy,std_test_accuracy,seeds\n";
    for (const SweepRow& row : sweep.rows)
        out << sweep.parameter << "," << fmt(row.value) << "," << fmt(row.report.mean_test_accuracy)
            << "," << fmt(row.report.std_test_accuracy) << "," << row.report.seeds.size() << "\n";
}

std::vector<std::tuple<std::string, double, double>> parse_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::tuple<std::string, double, double>> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else cur += ch;
        }
        fields.push_back(cur);
        if (fields.size() != 4) throw ParseError(path + ": malformed row '" + line + "'");
        const double acc = std::stod(fields[2]);
        const double val = fields[3].empty() ? std::nan("") : std::stod(fields[3]);
        rows.push_back({fields[0], acc, val});
    }
    return rows;
}

}  // namespace bonnc
