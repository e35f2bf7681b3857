#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "biharm/mesh.hpp"

namespace biharm {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed-row sparse matrix.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored. Instances are immutable; build them from triplets.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Sums duplicate (row, col) entries in input order, then drops entries
    /// that are exactly zero. The summation order is the triplet order, so
    /// identical triplet sequences give bit-identical matrices.
    static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);
    static SparseMatrix identity(Index n);
    static SparseMatrix diagonal(const Vector& d);

    [[nodiscard]] Index rows() const { return rows_; }
    [[nodiscard]] Index cols() const { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const { return values_.size(); }

    [[nodiscard]] std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
    [[nodiscard]] std::span<const Index> column_indices() const { return column_indices_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Stored value at (r, c), zero when absent.
    [[nodiscard]] double coeff(Index r, Index c) const;
    [[nodiscard]] Vector diagonal_entries() const;
    [[nodiscard]] Vector row_sums() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] bool is_symmetric(double tol = 0.0) const;

    [[nodiscard]] SparseMatrix transpose() const;
    /// Rows and columns picked by index lists (in the given order).
    [[nodiscard]] SparseMatrix submatrix(std::span<const Index> row_ids, std::span<const Index> col_ids) const;

    [[nodiscard]] DenseMatrix to_dense() const;
    [[nodiscard]] Eigen::SparseMatrix<double, Eigen::ColMajor, int> to_eigen() const;

    [[nodiscard]] std::vector<Triplet> triplets() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<std::int64_t> row_offsets_{0};
    std::vector<Index> column_indices_;
    std::vector<double> values_;
};

/// y = A x. Throws kDimensionMismatch.
Vector spmv(const SparseMatrix& a, const Vector& x);

/// Sparse product A B (row-by-row accumulation, deterministic).
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// Block matrix [[a, b], [c, d]] from four blocks with compatible shapes.
SparseMatrix block_matrix(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                          const SparseMatrix& d);

/// MatrixMarket coordinate export. Symmetric matrices are written with the
/// `symmetric` qualifier (lower triangle only), others as `general`.
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

} // namespace biharm
