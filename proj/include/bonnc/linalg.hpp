#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "bonnc/error.hpp"

namespace bonnc {

/// Predictions are clamped below by this before any log.
constexpr double kLogClamp = 1e-12;

/// Dense row-major matrix of doubles. Every kernel in the project runs on
/// this type with a fixed left-to-right summation order per output element,
/// so identical inputs produce bit-identical results.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0) {}
    Matrix(int rows, int cols, std::vector<double> data);

    static Matrix identity(int n);
    static Matrix constant(int rows, int cols, double value);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    double* row_ptr(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
    const double* row_ptr(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    void fill(double v);

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    /// Exact elementwise equality (bitwise on values).
    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);

/// Standard dense product; each output element accumulates left to right.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Frobenius inner product.
double dot(const Matrix& a, const Matrix& b);

/// Row-wise softmax with max-subtraction; all-equal rows come out uniform.
Matrix row_softmax(const Matrix& m);

/// Mean over masked rows of -sum_c target * log(max(pred, kLogClamp)).
/// Throws ArgumentError on an empty mask.
double masked_cross_entropy(const Matrix& pred, const Matrix& target, const std::vector<int>& mask);

/// Index of the row maximum; ties break to the lowest column.
int argmax_row(const Matrix& m, int row);

bool all_finite(const Matrix& m);

/// Throws NumericError naming `stage` if the matrix holds a NaN or Inf.
void require_finite(const Matrix& m, const std::string& stage);

/// Symmetric sparse matrix in compressed-row form. Column indices are
/// strictly increasing within each row and every stored (i,j) has a matching
/// (j,i) with equal value.
class SparseAdjacency {
public:
    SparseAdjacency() = default;

    /// Builds a 0/1 adjacency from undirected node pairs; symmetrizes,
    /// deduplicates, and drops self-loops.
    static SparseAdjacency from_undirected_edges(int n, const std::vector<std::pair<int, int>>& edges);

    /// Builds from explicit (row, col, value) entries. Entries must be unique;
    /// symmetry is validated.
    static SparseAdjacency from_entries(int n, std::vector<std::pair<std::pair<int, int>, double>> entries);

    static SparseAdjacency identity(int n);

    int n() const { return n_; }
    size_t nnz() const { return col_indices_.size(); }

    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    bool has_entry(int i, int j) const;
    double value_at(int i, int j) const;  // 0.0 when absent

    /// Sum of stored values in row i (left to right).
    double row_sum(int i) const;

    /// Throws ValidationError when any (i,j) lacks a matching (j,i) of equal value.
    void check_symmetric() const;

    bool operator==(const SparseAdjacency& o) const {
        return n_ == o.n_ && row_offsets_ == o.row_offsets_ && col_indices_ == o.col_indices_ &&
               values_ == o.values_;
    }

private:
    int n_ = 0;
    std::vector<int> row_offsets_;   // size n+1
    std::vector<int> col_indices_;   // strictly increasing per row
    std::vector<double> values_;
};

/// Sparse-dense product, row by row in storage order; equals
/// matmul(to_dense(adj), m) exactly.
Matrix spmm(const SparseAdjacency& adj, const Matrix& m);

Matrix to_dense(const SparseAdjacency& adj);

/// A matrix paired with its forward-mode tangents, one per tracked
/// upper-level scalar direction. The direction count is fixed for the
/// lifetime of a training window.
struct Dual {
    Matrix value;
    std::vector<Matrix> tangents;

    Dual() = default;
    explicit Dual(Matrix v) : value(std::move(v)) {}
    Dual(Matrix v, std::vector<Matrix> t);

    int directions() const { return static_cast<int>(tangents.size()); }

    /// Replaces the tangent list with `directions` zero matrices of the
    /// value's shape.
    void reset_tangents(int directions);
};

}  // namespace bonnc
