#pragma once

#include <memory>
#include <string_view>

#include "biharm/sparse.hpp"

namespace biharm {

enum class SolveMethod {
    kConjugateGradient,
    kSparseLU,
    kMinres,
    kDenseLU,
};

std::string_view to_string(SolveMethod method);

struct SolveReport {
    std::size_t iterations = 0; // 0 for direct solves
    double relative_residual = 0.0;
    SolveMethod method = SolveMethod::kConjugateGradient;
};

struct Solved {
    Vector x;
    SolveReport report;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// |A x - b| / max(|b|, tiny), always recomputed from scratch.
double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

/// Jacobi-preconditioned conjugate gradients, at most 20 n iterations.
///
/// Works for semidefinite A as long as b lies in its range. Throws
/// kNotConverged or kDimensionMismatch.
Solved solve_spd(const SparseMatrix& a, const Vector& b, double tol = kDefaultTolerance);

/// Unpreconditioned MINRES (Paige-Saunders), at most 20 n iterations.
Solved solve_minres(const SparseMatrix& a, const Vector& b, double tol = kDefaultTolerance);

/// Factorizes a symmetric (possibly indefinite) matrix once and solves for
/// any number of right-hand sides. Backed by a pivoted sparse LU.
class SymmetricIndefiniteSolver {
public:
    /// Throws kSingular if the factorization breaks down.
    explicit SymmetricIndefiniteSolver(const SparseMatrix& a);
    ~SymmetricIndefiniteSolver();
    SymmetricIndefiniteSolver(SymmetricIndefiniteSolver&&) noexcept;
    SymmetricIndefiniteSolver& operator=(SymmetricIndefiniteSolver&&) noexcept;

    /// Direct solve followed by up to three steps of iterative refinement.
    /// Throws kNotConverged if the residual stays above `tol`.
    [[nodiscard]] Solved solve(const Vector& b, double tol = kDefaultTolerance) const;

    [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }

private:
    struct Factorization;

    SparseMatrix matrix_;
    std::unique_ptr<Factorization> factorization_;
};

enum class IndefiniteBackend {
    kSparseLU,
    kMinres,
};

Solved solve_symmetric_indefinite(const SparseMatrix& a, const Vector& b, double tol = kDefaultTolerance,
                                  IndefiniteBackend backend = IndefiniteBackend::kSparseLU);

/// Reference solver for tests: LU with partial pivoting on a dense copy.
/// Limited to n <= 2000. Throws kSingular.
Vector dense_solve_oracle(const DenseMatrix& a, const Vector& b);

} // namespace biharm
