#include "biharm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets)
{
    if (rows < 0 || cols < 0) {
        raise(ErrorCode::kDimensionMismatch, "negative matrix dimension");
    }
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;

    // Stable bucket by row, then stable sort by column inside each row.
    std::vector<std::int64_t> count(static_cast<std::size_t>(rows) + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            raise(ErrorCode::kDimensionMismatch,
                  fmt::format("triplet ({}, {}) outside {}x{} matrix", t.row, t.col, rows, cols));
        }
        ++count[static_cast<std::size_t>(t.row) + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<std::size_t> order(triplets.size());
    {
        std::vector<std::int64_t> cursor(count.begin(), count.end() - 1);
        for (std::size_t k = 0; k < triplets.size(); ++k) {
            order[static_cast<std::size_t>(cursor[static_cast<std::size_t>(triplets[k].row)]++)] = k;
        }
    }

    m.row_offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (Index r = 0; r < rows; ++r) {
        const auto begin = order.begin() + count[static_cast<std::size_t>(r)];
        const auto end = order.begin() + count[static_cast<std::size_t>(r) + 1];
        std::stable_sort(begin, end, [&](std::size_t a, std::size_t b) { return triplets[a].col < triplets[b].col; });
        for (auto it = begin; it != end;) {
            const Index col = triplets[*it].col;
            double sum = 0.0;
            while (it != end && triplets[*it].col == col) {
                sum += triplets[*it].value;
                ++it;
            }
            if (sum != 0.0) {
                m.column_indices_.push_back(col);
                m.values_.push_back(sum);
            }
        }
        m.row_offsets_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(m.values_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(Index n)
{
    return diagonal(Vector::Ones(n));
}

SparseMatrix SparseMatrix::diagonal(const Vector& d)
{
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d.size()));
    for (Index i = 0; i < d.size(); ++i) {
        t.push_back({i, i, d[i]});
    }
    return from_triplets(static_cast<Index>(d.size()), static_cast<Index>(d.size()), t);
}

double SparseMatrix::coeff(Index r, Index c) const
{
    const auto begin = column_indices_.begin() + row_offsets_[static_cast<std::size_t>(r)];
    const auto end = column_indices_.begin() + row_offsets_[static_cast<std::size_t>(r) + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - column_indices_.begin())];
}

Vector SparseMatrix::diagonal_entries() const
{
    Vector d(std::min(rows_, cols_));
    for (Index i = 0; i < d.size(); ++i) {
        d[i] = coeff(i, i);
    }
    return d;
}

Vector SparseMatrix::row_sums() const
{
    return spmv(*this, Vector::Ones(cols_));
}

double SparseMatrix::frobenius_norm() const
{
    double s = 0.0;
    for (double v : values_) {
        s += v * v;
    }
    return std::sqrt(s);
}

bool SparseMatrix::is_symmetric(double tol) const
{
    if (rows_ != cols_) {
        return false;
    }
    for (Index r = 0; r < rows_; ++r) {
        for (auto k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k) {
            const Index c = column_indices_[static_cast<std::size_t>(k)];
            if (std::abs(values_[static_cast<std::size_t>(k)] - coeff(c, r)) > tol) {
                return false;
            }
        }
    }
    return true;
}

SparseMatrix SparseMatrix::transpose() const
{
    auto t = triplets();
    for (auto& e : t) {
        std::swap(e.row, e.col);
    }
    return from_triplets(cols_, rows_, t);
}

SparseMatrix SparseMatrix::submatrix(std::span<const Index> row_ids, std::span<const Index> col_ids) const
{
    std::vector<Index> col_map(static_cast<std::size_t>(cols_), -1);
    for (std::size_t j = 0; j < col_ids.size(); ++j) {
        col_map[static_cast<std::size_t>(col_ids[j])] = static_cast<Index>(j);
    }
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        const auto r = static_cast<std::size_t>(row_ids[i]);
        for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const Index mapped = col_map[static_cast<std::size_t>(column_indices_[static_cast<std::size_t>(k)])];
            if (mapped >= 0) {
                t.push_back({static_cast<Index>(i), mapped, values_[static_cast<std::size_t>(k)]});
            }
        }
    }
    return from_triplets(static_cast<Index>(row_ids.size()), static_cast<Index>(col_ids.size()), t);
}

DenseMatrix SparseMatrix::to_dense() const
{
    DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
    for (const auto& e : triplets()) {
        d(e.row, e.col) = e.value;
    }
    return d;
}

Eigen::SparseMatrix<double, Eigen::ColMajor, int> SparseMatrix::to_eigen() const
{
    std::vector<Eigen::Triplet<double, int>> t;
    t.reserve(values_.size());
    for (const auto& e : triplets()) {
        t.emplace_back(e.row, e.col, e.value);
    }
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> out(rows_, cols_);
    out.setFromTriplets(t.begin(), t.end());
    out.makeCompressed();
    return out;
}

std::vector<Triplet> SparseMatrix::triplets() const
{
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (Index r = 0; r < rows_; ++r) {
        for (auto k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k) {
            t.push_back({r, column_indices_[static_cast<std::size_t>(k)], values_[static_cast<std::size_t>(k)]});
        }
    }
    return t;
}

Vector spmv(const SparseMatrix& a, const Vector& x)
{
    if (x.size() != a.cols()) {
        raise(ErrorCode::kDimensionMismatch,
              fmt::format("spmv: matrix has {} columns, vector has {} entries", a.cols(), x.size()));
    }
    const auto offsets = a.row_offsets();
    const auto cols = a.column_indices();
    const auto vals = a.values();
    Vector y(a.rows());
    for (Index r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (auto k = offsets[static_cast<std::size_t>(r)]; k < offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            s += vals[static_cast<std::size_t>(k)] * x[cols[static_cast<std::size_t>(k)]];
        }
        y[r] = s;
    }
    return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.cols() != b.rows()) {
        raise(ErrorCode::kDimensionMismatch,
              fmt::format("multiply: {}x{} times {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    }
    const auto a_off = a.row_offsets();
    const auto a_col = a.column_indices();
    const auto a_val = a.values();
    const auto b_off = b.row_offsets();
    const auto b_col = b.column_indices();
    const auto b_val = b.values();

    std::vector<Triplet> t;
    std::vector<double> accumulator(static_cast<std::size_t>(b.cols()), 0.0);
    std::vector<std::uint8_t> touched(static_cast<std::size_t>(b.cols()), 0);
    std::vector<Index> pattern;
    for (Index r = 0; r < a.rows(); ++r) {
        pattern.clear();
        for (auto k = a_off[static_cast<std::size_t>(r)]; k < a_off[static_cast<std::size_t>(r) + 1]; ++k) {
            const auto mid = static_cast<std::size_t>(a_col[static_cast<std::size_t>(k)]);
            const double av = a_val[static_cast<std::size_t>(k)];
            for (auto q = b_off[mid]; q < b_off[mid + 1]; ++q) {
                const auto c = static_cast<std::size_t>(b_col[static_cast<std::size_t>(q)]);
                if (touched[c] == 0) {
                    touched[c] = 1;
                    pattern.push_back(static_cast<Index>(c));
                }
                accumulator[c] += av * b_val[static_cast<std::size_t>(q)];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (Index c : pattern) {
            t.push_back({r, c, accumulator[static_cast<std::size_t>(c)]});
            accumulator[static_cast<std::size_t>(c)] = 0.0;
            touched[static_cast<std::size_t>(c)] = 0;
        }
    }
    return SparseMatrix::from_triplets(a.rows(), b.cols(), t);
}

SparseMatrix block_matrix(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                          const SparseMatrix& d)
{
    if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()) {
        raise(ErrorCode::kDimensionMismatch, "block_matrix: incompatible block shapes");
    }
    std::vector<Triplet> t;
    t.reserve(a.nonzeros() + b.nonzeros() + c.nonzeros() + d.nonzeros());
    const auto append = [&t](const SparseMatrix& m, Index dr, Index dc) {
        for (auto e : m.triplets()) {
            t.push_back({e.row + dr, e.col + dc, e.value});
        }
    };
    append(a, 0, 0);
    append(b, 0, a.cols());
    append(c, a.rows(), 0);
    append(d, a.rows(), a.cols());
    return SparseMatrix::from_triplets(a.rows() + c.rows(), a.cols() + b.cols(), t);
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        raise(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
    }
    const bool symmetric = a.is_symmetric();
    auto entries = a.triplets();
    if (symmetric) {
        std::erase_if(entries, [](const Triplet& e) { return e.col > e.row; });
    }
    out << (symmetric ? "%%MatrixMarket matrix coordinate real symmetric\n"
                      : "%%MatrixMarket matrix coordinate real general\n");
    out << fmt::format("{} {} {}\n", a.rows(), a.cols(), entries.size());
    for (const auto& e : entries) {
        out << fmt::format("{} {} {:.17g}\n", e.row + 1, e.col + 1, e.value);
    }
}

} // namespace biharm
