#include "bonnc/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace bonnc {

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
        throw DimensionError("Matrix: data length does not match rows*cols");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::constant(int rows, int cols, double value) {
    Matrix m(rows, cols);
    m.fill(value);
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Matrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw DimensionError("Matrix::from_rows: ragged rows");
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix& Matrix::operator+=(const Matrix& o) {
    if (!same_shape(o)) throw DimensionError("Matrix +=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (!same_shape(o)) throw DimensionError("Matrix -=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }
Matrix operator-(Matrix a, const Matrix& b) { a -= b; return a; }
Matrix operator*(Matrix a, double s) { a *= s; return a; }

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (int l = 0; l < a.cols(); ++l) acc += a(i, l) * b(l, j);
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DimensionError("hadamard: shape mismatch");
    Matrix out(a.rows(), a.cols());
    for (size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

double dot(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DimensionError("dot: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
    return acc;
}

Matrix row_softmax(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
        double mx = m(i, 0);
        for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, m(i, j));
        double sum = 0.0;
        for (int j = 0; j < m.cols(); ++j) {
            const double e = std::exp(m(i, j) - mx);
            out(i, j) = e;
            sum += e;
        }
        for (int j = 0; j < m.cols(); ++j) out(i, j) /= sum;
    }
    return out;
}

double masked_cross_entropy(const Matrix& pred, const Matrix& target, const std::vector<int>& mask) {
    if (!pred.same_shape(target)) throw DimensionError("masked_cross_entropy: shape mismatch");
    if (mask.empty()) throw ArgumentError("masked_cross_entropy: empty mask");
    double acc = 0.0;
    for (int v : mask) {
        if (v < 0 || v >= pred.rows()) throw ArgumentError("masked_cross_entropy: node out of range");
        for (int j = 0; j < pred.cols(); ++j)
            acc -= target(v, j) * std::log(std::max(pred(v, j), kLogClamp));
    }
    return acc / static_cast<double>(mask.size());
}

int argmax_row(const Matrix& m, int row) {
    int best = 0;
    for (int j = 1; j < m.cols(); ++j)
        if (m(row, j) > m(row, best)) best = j;
    return best;
}

bool all_finite(const Matrix& m) {
    for (double v : m.data())
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Matrix& m, const std::string& stage) {
    if (!all_finite(m)) throw NumericError("non-finite values at stage: " + stage);
}

SparseAdjacency SparseAdjacency::from_undirected_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::pair<std::pair<int, int>, double>> entries;
    entries.reserve(edges.size() * 2);
    for (auto [a, b] : edges) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw ValidationError("from_undirected_edges: node id out of range");
        if (a == b) continue;
        entries.push_back({{a, b}, 1.0});
        entries.push_back({{b, a}, 1.0});
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const auto& x, const auto& y) { return x.first == y.first; }),
                  entries.end());
    return from_entries(n, std::move(entries));
}

SparseAdjacency SparseAdjacency::from_entries(int n, std::vector<std::pair<std::pair<int, int>, double>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (size_t i = 1; i < entries.size(); ++i)
        if (entries[i].first == entries[i - 1].first)
            throw ValidationError("from_entries: duplicate entry");
    SparseAdjacency adj;
    adj.n_ = n;
    adj.row_offsets_.assign(n + 1, 0);
    adj.col_indices_.reserve(entries.size());
    adj.values_.reserve(entries.size());
    for (const auto& [rc, v] : entries) {
        const auto [r, c] = rc;
        if (r < 0 || r >= n || c < 0 || c >= n)
            throw ValidationError("from_entries: index out of range");
        adj.row_offsets_[r + 1]++;
        adj.col_indices_.push_back(c);
        adj.values_.push_back(v);
    }
    for (int i = 0; i < n; ++i) adj.row_offsets_[i + 1] += adj.row_offsets_[i];
    adj.check_symmetric();
    return adj;
}

SparseAdjacency SparseAdjacency::identity(int n) {
    std::vector<std::pair<std::pair<int, int>, double>> entries;
    entries.reserve(n);
    for (int i = 0; i < n; ++i) entries.push_back({{i, i}, 1.0});
    return from_entries(n, std::move(entries));
}

bool SparseAdjacency::has_entry(int i, int j) const {
    const auto begin = col_indices_.begin() + row_offsets_[i];
    const auto end = col_indices_.begin() + row_offsets_[i + 1];
    return std::binary_search(begin, end, j);
}

double SparseAdjacency::value_at(int i, int j) const {
    const auto begin = col_indices_.begin() + row_offsets_[i];
    const auto end = col_indices_.begin() + row_offsets_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values_[static_cast<size_t>(it - col_indices_.begin())];
}

double SparseAdjacency::row_sum(int i) const {
    double acc = 0.0;
    for (int e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) acc += values_[e];
    return acc;
}

void SparseAdjacency::check_symmetric() const {
    for (int i = 0; i < n_; ++i) {
        for (int e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) {
            const int j = col_indices_[e];
            if (value_at(j, i) != values_[e])
                throw ValidationError("SparseAdjacency: not symmetric at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
        }
    }
}

Matrix spmm(const SparseAdjacency& adj, const Matrix& m) {
    if (adj.n() != m.rows()) throw DimensionError("spmm: adjacency size does not match rows");
    Matrix out(adj.n(), m.cols());
    const auto& offs = adj.row_offsets();
    const auto& cols = adj.col_indices();
    const auto& vals = adj.values();
    for (int i = 0; i < adj.n(); ++i) {
        double* dst = out.row_ptr(i);
        for (int e = offs[i]; e < offs[i + 1]; ++e) {
            const double v = vals[e];
            const double* src = m.row_ptr(cols[e]);
            for (int j = 0; j < m.cols(); ++j) dst[j] += v * src[j];
        }
    }
    return out;
}

Matrix to_dense(const SparseAdjacency& adj) {
    Matrix out(adj.n(), adj.n());
    const auto& offs = adj.row_offsets();
    for (int i = 0; i < adj.n(); ++i)
        for (int e = offs[i]; e < offs[i + 1]; ++e)
            out(i, adj.col_indices()[e]) = adj.values()[e];
    return out;
}

Dual::Dual(Matrix v, std::vector<Matrix> t) : value(std::move(v)), tangents(std::move(t)) {
    for (const Matrix& tan : tangents)
        if (!tan.same_shape(value)) throw DimensionError("Dual: tangent shape differs from value");
}

void Dual::reset_tangents(int directions) {
    tangents.assign(static_cast<size_t>(directions), Matrix(value.rows(), value.cols()));
}

}  // namespace bonnc
