#include "grembed/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "grembed/error.hpp"

namespace grembed::num {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> DenseMatrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void DenseMatrix::set_column(std::size_t c, std::span<const double> values) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double DenseMatrix::frobenius_norm() const noexcept { return norm2(data_); }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("multiply: inner dimensions differ");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
        }
    }
    return out;
}

DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw ValidationError("multiply_at_b: row counts differ");
    DenseMatrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const auto ar = a.row(k);
        const auto br = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ar[i];
            if (aki == 0.0) continue;
            auto dst = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aki * br[j];
        }
    }
    return out;
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw ValidationError("multiply: vector length differs");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
        return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.offsets_.assign(rows + 1, 0);
    std::size_t i = 0;
    while (i < entries.size()) {
        const auto [r, c, v0] = entries[i];
        if (r >= rows || c >= cols) throw ValidationError("sparse entry out of range");
        double v = v0;
        std::size_t j = i + 1;
        while (j < entries.size() && std::get<0>(entries[j]) == r && std::get<1>(entries[j]) == c)
            v += std::get<2>(entries[j++]);
        if (v != 0.0) {
            m.cols_idx_.push_back(c);
            m.values_.push_back(v);
            ++m.offsets_[r + 1];
        }
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.offsets_[r + 1] += m.offsets_[r];
    return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& d) {
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c)
            if (d(r, c) != 0.0) t.emplace_back(r, c, d(r, c));
    return from_triplets(d.rows(), d.cols(), std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols_ || y.size() != rows_) throw ValidationError("sparse multiply: size mismatch");
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * x[cols_idx_[k]];
        y[r] = s;
    }
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) d(r, cols_idx_[k]) = values_[k];
    return d;
}

double SparseMatrix::frobenius_norm() const noexcept { return norm2(values_); }

double SparseMatrix::asymmetry() const {
    auto lookup = [this](std::size_t r, std::size_t c) {
        const auto first = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[r]);
        const auto last = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[r + 1]);
        const auto it = std::lower_bound(first, last, c);
        return (it != last && *it == c) ? values_[static_cast<std::size_t>(it - cols_idx_.begin())] : 0.0;
    };
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k)
            worst = std::max(worst, std::abs(values_[k] - lookup(cols_idx_[k], r)));
    return worst;
}

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

void write_csv(const DenseMatrix& m, std::ostream& out) {
    out << m.rows() << ',' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

namespace {

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ParseError(source, line, "bad number '" + std::string(text) + "'");
    return v;
}

}  // namespace

DenseMatrix read_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing rows,cols header");
    std::size_t rows = 0;
    std::size_t cols = 0;
    {
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(source, 1, "header must be rows,cols");
        rows = static_cast<std::size_t>(parse_double(std::string_view(line).substr(0, comma), source, 1));
        cols = static_cast<std::size_t>(parse_double(std::string_view(line).substr(comma + 1), source, 1));
    }
    DenseMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw ParseError(source, r + 2, "too few rows");
        std::string_view rest(line);
        for (std::size_t c = 0; c < cols; ++c) {
            const auto comma = rest.find(',');
            const auto field = rest.substr(0, comma);
            m(r, c) = parse_double(field, source, r + 2);
            if (c + 1 < cols) {
                if (comma == std::string_view::npos) throw ParseError(source, r + 2, "too few columns");
                rest.remove_prefix(comma + 1);
            } else if (comma != std::string_view::npos) {
                throw ParseError(source, r + 2, "too many columns");
            }
        }
    }
    return m;
}

}  // namespace grembed::num
