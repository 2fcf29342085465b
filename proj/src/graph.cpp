#include "bonnc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bonnc/rng.hpp"

namespace bonnc {

const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Unlabelled: return "unlabelled";
        case NodeStatus::Original: return "original";
        case NodeStatus::Filtered: return "filtered";
        case NodeStatus::Pseudo: return "pseudo";
    }
    return "?";
}

std::vector<int> LabelState::supervising_nodes() const {
    std::vector<int> out;
    for (int v = 0; v < n(); ++v)
        if (supervising(v)) out.push_back(v);
    return out;
}

std::vector<int> LabelState::supervising_nodes(const std::vector<int>& mask) const {
    std::vector<int> out;
    for (int v : mask)
        if (supervising(v)) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

Matrix LabelState::one_hot() const {
    Matrix m(n(), c);
    for (int v = 0; v < n(); ++v)
        if (supervising(v)) m(v, label[v]) = 1.0;
    return m;
}

LabelState LabelState::restricted_to(const std::vector<int>& keep) const {
    LabelState out(n(), c);
    for (int v : keep) {
        out.label[v] = label[v];
        out.status[v] = status[v];
        out.pseudo_round[v] = pseudo_round[v];
    }
    return out;
}

GroundTruth GroundTruth::from_labels(const LabelState& ls) {
    GroundTruth gt;
    gt.label = ls.label;
    return gt;
}

SparseAdjacency normalize_adjacency(const SparseAdjacency& a) {
    a.check_symmetric();
    const int n = a.n();
    for (int i = 0; i < n; ++i)
        if (a.has_entry(i, i)) throw ValidationError("normalize_adjacency: input stores a self-loop");

    // degree of A + I
    std::vector<double> inv_sqrt_deg(n);
    for (int i = 0; i < n; ++i) inv_sqrt_deg[i] = 1.0 / std::sqrt(a.row_sum(i) + 1.0);

    std::vector<std::pair<std::pair<int, int>, double>> entries;
    entries.reserve(a.nnz() + n);
    const auto& offs = a.row_offsets();
    const auto& cols = a.col_indices();
    const auto& vals = a.values();
    for (int i = 0; i < n; ++i) {
        for (int e = offs[i]; e < offs[i + 1]; ++e) {
            const int j = cols[e];
            entries.push_back({{i, j}, vals[e] * inv_sqrt_deg[i] * inv_sqrt_deg[j]});
        }
        entries.push_back({{i, i}, inv_sqrt_deg[i] * inv_sqrt_deg[i]});
    }
    return SparseAdjacency::from_entries(n, std::move(entries));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

[[noreturn]] void parse_fail(const std::string& file, int line_no, const std::string& what) {
    throw ParseError(file + ":" + std::to_string(line_no) + ": " + what);
}

long parse_int_field(const std::string& file, int line_no, const std::string& text) {
    try {
        size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size()) parse_fail(file, line_no, "trailing characters in integer '" + text + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(file, line_no, "expected integer, got '" + text + "'");
    }
}

double parse_double_field(const std::string& file, int line_no, const std::string& text) {
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) parse_fail(file, line_no, "trailing characters in number '" + text + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(file, line_no, "expected number, got '" + text + "'");
    }
}

}  // namespace

std::pair<Graph, LabelState> load_graph(const std::string& edge_file, const std::string& feature_file,
                                        const std::string& label_file, int expected_classes) {
    // features first: the row count fixes n
    std::ifstream ff(feature_file);
    if (!ff) throw IoError("cannot open feature file: " + feature_file);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    int d = -1;
    while (std::getline(ff, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        const auto fields = split_csv_line(line);
        if (d < 0) d = static_cast<int>(fields.size());
        if (static_cast<int>(fields.size()) != d)
            parse_fail(feature_file, line_no, "ragged feature row");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double_field(feature_file, line_no, f));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(feature_file + ": no feature rows");
    const int n = static_cast<int>(rows.size());

    Graph g;
    g.n = n;
    g.d = d;
    g.x = Matrix(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) g.x(i, j) = rows[i][j];

    std::ifstream ef(edge_file);
    if (!ef) throw IoError("cannot open edge file: " + edge_file);
    std::vector<std::pair<int, int>> edges;
    line_no = 0;
    while (std::getline(ef, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        std::istringstream ss(line);
        long a = 0, b = 0;
        if (!(ss >> a >> b)) parse_fail(edge_file, line_no, "expected 'src dst'");
        std::string extra;
        if (ss >> extra) parse_fail(edge_file, line_no, "trailing characters after edge");
        if (a < 0 || a >= n || b < 0 || b >= n)
            parse_fail(edge_file, line_no, "node id out of range [0," + std::to_string(n) + ")");
        edges.push_back({static_cast<int>(a), static_cast<int>(b)});
    }
    g.a = SparseAdjacency::from_undirected_edges(n, edges);
    g.a_hat = normalize_adjacency(g.a);

    std::ifstream lf(label_file);
    if (!lf) throw IoError("cannot open label file: " + label_file);
    LabelState labels(n, expected_classes);
    int max_class = -1;
    line_no = 0;
    while (std::getline(lf, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) parse_fail(label_file, line_no, "expected 'node_id,class_id'");
        const long v = parse_int_field(label_file, line_no, fields[0]);
        const long cls = parse_int_field(label_file, line_no, fields[1]);
        if (v < 0 || v >= n) parse_fail(label_file, line_no, "node id out of range");
        if (cls < 0) parse_fail(label_file, line_no, "negative class id");
        if (expected_classes > 0 && cls >= expected_classes)
            parse_fail(label_file, line_no,
                       "class id " + std::to_string(cls) + " outside [0," + std::to_string(expected_classes) + ")");
        labels.label[v] = static_cast<int>(cls);
        labels.status[v] = NodeStatus::Original;
        max_class = std::max(max_class, static_cast<int>(cls));
    }
    if (expected_classes == 0) labels.c = max_class + 1;
    if (labels.c <= 0) throw ParseError(label_file + ": no labels found");
    return {std::move(g), std::move(labels)};
}

void save_graph(const Graph& g, const LabelState& labels, const std::string& edge_file,
                const std::string& feature_file, const std::string& label_file) {
    std::ofstream ef(edge_file);
    if (!ef) throw IoError("cannot write edge file: " + edge_file);
    const auto& offs = g.a.row_offsets();
    for (int i = 0; i < g.n; ++i)
        for (int e = offs[i]; e < offs[i + 1]; ++e)
            if (i < g.a.col_indices()[e]) ef << i << " " << g.a.col_indices()[e] << "\n";

    std::ofstream ff(feature_file);
    if (!ff) throw IoError("cannot write feature file: " + feature_file);
    char buf[40];
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.x(i, j));
            ff << (j ? "," : "") << buf;
        }
        ff << "\n";
    }

    std::ofstream lf(label_file);
    if (!lf) throw IoError("cannot write label file: " + label_file);
    for (int v = 0; v < g.n; ++v)
        if (labels.label[v] >= 0 && labels.status[v] == NodeStatus::Original)
            lf << v << "," << labels.label[v] << "\n";
}

SplitMasks make_splits(const LabelState& labels, double train_fraction, double val_fraction,
                       double test_fraction, uint64_t seed) {
    const double fractions[3] = {train_fraction, val_fraction, test_fraction};
    double total = 0.0;
    for (double f : fractions) {
        if (f <= 0.0 || f > 1.0) throw ValidationError("make_splits: fractions must lie in (0,1]");
        total += f;
    }
    if (total > 1.0 + 1e-12) throw ValidationError("make_splits: fractions sum beyond 1");

    std::vector<std::vector<int>> by_class(labels.c);
    for (int v = 0; v < labels.n(); ++v)
        if (labels.label[v] >= 0) by_class[labels.label[v]].push_back(v);

    Rng rng(derive_seed(seed, 0x5717));
    SplitMasks masks;
    for (int cls = 0; cls < labels.c; ++cls) {
        auto& nodes = by_class[cls];
        rng.shuffle(nodes);
        const double sz = static_cast<double>(nodes.size());
        const size_t n_train = static_cast<size_t>(std::llround(train_fraction * sz));
        const size_t n_val = static_cast<size_t>(std::llround(val_fraction * sz));
        const size_t n_test = static_cast<size_t>(std::llround(test_fraction * sz));
        if (n_train == 0)
            throw ValidationError("make_splits: class " + std::to_string(cls) +
                                  " would get zero training nodes");
        if (n_train + n_val + n_test > nodes.size())
            throw ValidationError("make_splits: rounding exceeded class " + std::to_string(cls));
        size_t pos = 0;
        for (size_t i = 0; i < n_train; ++i) masks.train.push_back(nodes[pos++]);
        for (size_t i = 0; i < n_val; ++i) masks.validation.push_back(nodes[pos++]);
        for (size_t i = 0; i < n_test; ++i) masks.test.push_back(nodes[pos++]);
    }
    std::sort(masks.train.begin(), masks.train.end());
    std::sort(masks.validation.begin(), masks.validation.end());
    std::sort(masks.test.begin(), masks.test.end());
    return masks;
}

std::pair<Graph, LabelState> generate_sbm(const SbmParams& p, uint64_t seed) {
    if (p.n <= 0 || p.classes < 1 || p.feature_dim <= 0)
        throw ValidationError("generate_sbm: n, classes and feature_dim must be positive");
    if (!(0.0 <= p.p_inter && p.p_inter < p.p_intra && p.p_intra <= 1.0))
        throw ValidationError("generate_sbm: need 0 <= p_inter < p_intra <= 1");
    if (p.feature_noise < 0.0) throw ValidationError("generate_sbm: negative feature noise");

    // contiguous balanced blocks; the first n % classes blocks get one extra node
    LabelState labels(p.n, p.classes);
    {
        const int base = p.n / p.classes;
        const int extra = p.n % p.classes;
        int v = 0;
        for (int cls = 0; cls < p.classes; ++cls) {
            const int sz = base + (cls < extra ? 1 : 0);
            for (int i = 0; i < sz; ++i, ++v) {
                labels.label[v] = cls;
                labels.status[v] = NodeStatus::Original;
            }
        }
    }

    Graph g;
    g.n = p.n;
    g.d = p.feature_dim;

    Rng edge_rng(derive_seed(seed, 1));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p.n; ++i) {
        for (int j = i + 1; j < p.n; ++j) {
            const double prob = labels.label[i] == labels.label[j] ? p.p_intra : p.p_inter;
            if (edge_rng.uniform() < prob) edges.push_back({i, j});
        }
    }
    g.a = SparseAdjacency::from_undirected_edges(p.n, edges);
    g.a_hat = normalize_adjacency(g.a);

    // class mean for class j is the unit vector on coordinate j mod d
    Rng feat_rng(derive_seed(seed, 2));
    g.x = Matrix(p.n, p.feature_dim);
    for (int v = 0; v < p.n; ++v) {
        for (int j = 0; j < p.feature_dim; ++j) {
            const double mean = (labels.label[v] % p.feature_dim) == j ? 1.0 : 0.0;
            g.x(v, j) = mean + (p.feature_noise > 0.0 ? p.feature_noise * feat_rng.normal() : 0.0);
        }
    }
    return {std::move(g), std::move(labels)};
}

double accuracy(const Matrix& probs, const std::vector<int>& labels, const std::vector<int>& mask) {
    int hit = 0, seen = 0;
    for (int v : mask) {
        if (labels[v] < 0) continue;
        ++seen;
        if (argmax_row(probs, v) == labels[v]) ++hit;
    }
    if (seen == 0) return std::nan("");
    return static_cast<double>(hit) / static_cast<double>(seen);
}

}  // namespace bonnc
