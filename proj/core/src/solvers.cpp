#include "biharm/solvers.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

namespace {

std::size_t iteration_cap(Index n)
{
    return 20 * static_cast<std::size_t>(std::max<Index>(n, 1));
}

void check_square(const SparseMatrix& a, const Vector& b, std::string_view who)
{
    if (a.rows() != a.cols() || b.size() != a.rows()) {
        raise(ErrorCode::kDimensionMismatch,
              fmt::format("{}: matrix {}x{}, rhs {}", who, a.rows(), a.cols(), b.size()));
    }
}

} // namespace

std::string_view to_string(SolveMethod method)
{
    switch (method) {
    case SolveMethod::kConjugateGradient: return "cg";
    case SolveMethod::kSparseLU: return "sparse-lu";
    case SolveMethod::kMinres: return "minres";
    case SolveMethod::kDenseLU: return "dense-lu";
    }
    return "unknown";
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b)
{
    const Vector r = spmv(a, x) - b;
    return r.norm() / std::max(b.norm(), std::numeric_limits<double>::min());
}

Solved solve_spd(const SparseMatrix& a, const Vector& b, double tol)
{
    check_square(a, b, "solve_spd");
    const Index n = a.rows();
    Solved out{Vector::Zero(n), {0, 0.0, SolveMethod::kConjugateGradient}};
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        return out;
    }

    Vector inv_diag = a.diagonal_entries();
    for (Index i = 0; i < n; ++i) {
        inv_diag[i] = inv_diag[i] > 0.0 ? 1.0 / inv_diag[i] : 1.0;
    }

    const std::size_t cap = iteration_cap(n);
    Vector& x = out.x;
    std::size_t it = 0;
    double previous_true = std::numeric_limits<double>::infinity();
    // Outer loop restarts from the true residual when the recurrence drifts,
    // and gives up once a restart no longer halves it (rounding floor).
    while (true) {
        Vector r = b - spmv(a, x);
        const double true_norm = r.norm();
        if (true_norm <= tol * b_norm || true_norm > 0.5 * previous_true) {
            break;
        }
        previous_true = true_norm;
        Vector z = inv_diag.cwiseProduct(r);
        Vector p = z;
        double rz = r.dot(z);
        while (it < cap) {
            const Vector ap = spmv(a, p);
            const double pap = p.dot(ap);
            if (!(pap > 0.0)) {
                break;
            }
            const double alpha = rz / pap;
            x += alpha * p;
            r -= alpha * ap;
            ++it;
            if (r.norm() <= 0.5 * tol * b_norm) {
                break;
            }
            z = inv_diag.cwiseProduct(r);
            const double rz_next = r.dot(z);
            p = z + (rz_next / rz) * p;
            rz = rz_next;
        }
        if (it >= cap || relative_residual(a, x, b) <= tol) {
            break;
        }
        if (!(x.allFinite())) {
            break;
        }
    }

    out.report.iterations = it;
    out.report.relative_residual = relative_residual(a, x, b);
    if (!(out.report.relative_residual <= tol)) {
        raise(ErrorCode::kNotConverged, fmt::format("cg reached residual {:.3e} after {} iterations (tol {:.1e})",
                                                    out.report.relative_residual, it, tol));
    }
    return out;
}

Solved solve_minres(const SparseMatrix& a, const Vector& b, double tol)
{
    check_square(a, b, "solve_minres");
    const Index n = a.rows();
    Solved out{Vector::Zero(n), {0, 0.0, SolveMethod::kMinres}};
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        return out;
    }

    // Lanczos vectors v_{k-1}, v_k and the last two search directions.
    Vector v_prev = Vector::Zero(n);
    Vector v = b / b_norm;
    Vector w_prev = Vector::Zero(n);
    Vector w_prev2 = Vector::Zero(n);
    double beta = b_norm;
    double eta = b_norm;
    double c_prev = 1.0, c_prev2 = 1.0;
    double s_prev = 0.0, s_prev2 = 0.0;

    const std::size_t cap = iteration_cap(n);
    std::size_t it = 0;
    Vector& x = out.x;
    while (it < cap) {
        Vector av = spmv(a, v);
        const double alpha = v.dot(av);
        av -= alpha * v + beta * v_prev;
        const double beta_next = av.norm();

        // Apply the previous two rotations to the new column of T.
        const double delta = c_prev * alpha - c_prev2 * s_prev * beta;
        const double rho2 = s_prev * alpha + c_prev2 * c_prev * beta;
        const double rho3 = s_prev2 * beta;
        const double rho1 = std::hypot(delta, beta_next);
        if (rho1 == 0.0) {
            break;
        }
        const double c = delta / rho1;
        const double s = beta_next / rho1;

        const Vector w = (v - rho3 * w_prev2 - rho2 * w_prev) / rho1;
        x += c * eta * w;
        eta = -s * eta;
        ++it;

        w_prev2 = w_prev;
        w_prev = w;
        c_prev2 = c_prev;
        c_prev = c;
        s_prev2 = s_prev;
        s_prev = s;
        beta = beta_next;

        if (std::abs(eta) <= 0.5 * tol * b_norm || beta_next == 0.0) {
            break;
        }
        v_prev = v;
        v = av / beta_next;
    }

    out.report.iterations = it;
    out.report.relative_residual = relative_residual(a, x, b);
    if (!(out.report.relative_residual <= tol)) {
        raise(ErrorCode::kNotConverged, fmt::format("minres reached residual {:.3e} after {} iterations (tol {:.1e})",
                                                    out.report.relative_residual, it, tol));
    }
    return out;
}

struct SymmetricIndefiniteSolver::Factorization {
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>> lu;
};

SymmetricIndefiniteSolver::SymmetricIndefiniteSolver(const SparseMatrix& a)
    : matrix_(a)
    , factorization_(std::make_unique<Factorization>())
{
    if (a.rows() != a.cols()) {
        raise(ErrorCode::kDimensionMismatch, "indefinite solver needs a square matrix");
    }
    factorization_->matrix = a.to_eigen();
    factorization_->lu.compute(factorization_->matrix);
    if (factorization_->lu.info() != Eigen::Success) {
        raise(ErrorCode::kSingular, fmt::format("sparse LU failed: {}", factorization_->lu.lastErrorMessage()));
    }
}

SymmetricIndefiniteSolver::~SymmetricIndefiniteSolver() = default;
SymmetricIndefiniteSolver::SymmetricIndefiniteSolver(SymmetricIndefiniteSolver&&) noexcept = default;
SymmetricIndefiniteSolver& SymmetricIndefiniteSolver::operator=(SymmetricIndefiniteSolver&&) noexcept = default;

Solved SymmetricIndefiniteSolver::solve(const Vector& b, double tol) const
{
    check_square(matrix_, b, "solve_symmetric_indefinite");
    Solved out{Vector::Zero(matrix_.rows()), {0, 0.0, SolveMethod::kSparseLU}};
    if (b.norm() == 0.0) {
        return out;
    }
    out.x = factorization_->lu.solve(b);
    double res = relative_residual(matrix_, out.x, b);
    for (int step = 0; step < 3 && res > 0.1 * tol; ++step) {
        const Vector r = b - spmv(matrix_, out.x);
        const Vector dx = factorization_->lu.solve(r);
        const Vector refined = out.x + dx;
        const double refined_res = relative_residual(matrix_, refined, b);
        if (!(refined_res < res)) {
            break;
        }
        out.x = refined;
        res = refined_res;
    }
    out.report.relative_residual = res;
    if (!(res <= tol)) {
        raise(ErrorCode::kNotConverged, fmt::format("sparse LU residual {:.3e} above tol {:.1e}", res, tol));
    }
    return out;
}

Solved solve_symmetric_indefinite(const SparseMatrix& a, const Vector& b, double tol, IndefiniteBackend backend)
{
    if (backend == IndefiniteBackend::kMinres) {
        return solve_minres(a, b, tol);
    }
    check_square(a, b, "solve_symmetric_indefinite");
    return SymmetricIndefiniteSolver(a).solve(b, tol);
}

Vector dense_solve_oracle(const DenseMatrix& a, const Vector& b)
{
    const Index n = static_cast<Index>(a.rows());
    if (a.cols() != n || b.size() != n) {
        raise(ErrorCode::kDimensionMismatch, "dense_solve_oracle: shape mismatch");
    }
    if (n > 2000) {
        raise(ErrorCode::kInvalidInput, fmt::format("dense oracle limited to n <= 2000 (got {})", n));
    }

    DenseMatrix lu = a;
    Vector x = b;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double pivot_floor = static_cast<double>(std::max<Index>(n, 1)) * std::numeric_limits<double>::epsilon() * scale;

    for (Index k = 0; k < n; ++k) {
        Index pivot = k;
        for (Index i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) {
                pivot = i;
            }
        }
        if (std::abs(lu(pivot, k)) <= pivot_floor) {
            raise(ErrorCode::kSingular, fmt::format("zero pivot in column {}", k));
        }
        if (pivot != k) {
            lu.row(k).swap(lu.row(pivot));
            std::swap(x[k], x[pivot]);
        }
        for (Index i = k + 1; i < n; ++i) {
            const double factor = lu(i, k) / lu(k, k);
            if (factor == 0.0) {
                continue;
            }
            for (Index j = k + 1; j < n; ++j) {
                lu(i, j) -= factor * lu(k, j);
            }
            x[i] -= factor * x[k];
        }
    }
    for (Index k = n - 1; k >= 0; --k) {
        double s = x[k];
        for (Index j = k + 1; j < n; ++j) {
            s -= lu(k, j) * x[j];
        }
        x[k] = s / lu(k, k);
    }
    return x;
}

} // namespace biharm
