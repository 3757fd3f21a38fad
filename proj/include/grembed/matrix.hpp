#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace grembed::num {

// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> values);

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    DenseMatrix transposed() const;
    double frobenius_norm() const noexcept;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b without forming the transpose.
DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

/// Compressed sparse row matrix. Column indices are sorted within a row and
/// explicit zeros are never stored.
class SparseMatrix {
public:
    using Triplet = std::tuple<std::size_t, std::size_t, double>;

    SparseMatrix() = default;

    // Duplicate (row, col) entries are summed; entries that sum to zero are dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
    static SparseMatrix from_dense(const DenseMatrix& m);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return cols_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    void multiply(std::span<const double> x, std::span<double> y) const;
    DenseMatrix to_dense() const;
    double frobenius_norm() const noexcept;
    // Largest |a_ij - a_ji|.
    double asymmetry() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> cols_idx_;
    std::vector<double> values_;
};

// CSV with a `rows,cols` header line and 17 significant digits per value.
void write_csv(const DenseMatrix& m, std::ostream& out);
DenseMatrix read_csv(std::istream& in, const std::string& source = "<stream>");

// Shortest-roundtrip-safe decimal text for a double (17 significant digits).
std::string format_double(double v);

}  // namespace grembed::num
