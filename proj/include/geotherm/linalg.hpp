#pragma once

// Sparse assembly accumulation and direct solves.
//
// Systems are accumulated as coordinate triplets (duplicates sum on
// consolidation). Dirichlet constraints apply symmetrically: constrained
// columns are eliminated into the right-hand side and constrained rows
// replaced by identity rows, so saddle structure survives for factorization
// reuse. The factorization itself is Eigen's sparse LU.

#include "geotherm/core.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace geotherm {

using SpMat = Eigen::SparseMatrix<double>;
using DVec = Eigen::VectorXd;

struct SparseSystem {
    int n = 0;
    std::vector<Eigen::Triplet<double>> triplets;
    DVec rhs;

    explicit SparseSystem(int dim = 0) { resize(dim); }
    void resize(int dim) {
        n = dim;
        rhs = DVec::Zero(dim);
    }
    void add(int i, int j, double v) { triplets.emplace_back(i, j, v); }
    void add_rhs(int i, double v) { rhs[i] += v; }

    /// Symmetric Dirichlet elimination at triplet level. Constrained rows
    /// become identity rows carrying the boundary value.
    void constrain(const std::vector<std::pair<int, double>>& bc) {
        if (bc.empty()) {
            consolidate();
            return;
        }
        std::vector<char> fixed(n, 0);
        std::vector<double> value(n, 0.0);
        for (auto& [dof, val] : bc) {
            fixed[dof] = 1;
            value[dof] = val;
        }
        std::vector<Eigen::Triplet<double>> kept;
        kept.reserve(triplets.size());
        for (const auto& t : triplets) {
            if (fixed[t.row()]) continue;
            if (fixed[t.col()]) {
                rhs[t.row()] -= t.value() * value[t.col()];
                continue;
            }
            kept.push_back(t);
        }
        for (int i = 0; i < n; ++i)
            if (fixed[i]) {
                kept.emplace_back(i, i, 1.0);
                rhs[i] = value[i];
            }
        triplets.swap(kept);
        consolidate();
    }

    void consolidate() {
        matrix_ = std::make_shared<SpMat>(n, n);
        matrix_->setFromTriplets(triplets.begin(), triplets.end());
        matrix_->makeCompressed();
    }

    const SpMat& matrix() const {
        if (!matrix_) throw Error("SparseSystem: consolidate before reading the matrix");
        return *matrix_;
    }

    std::shared_ptr<SpMat> matrix_;
};

struct Factorization {
    std::shared_ptr<Eigen::SparseLU<SpMat>> lu;
    std::shared_ptr<SpMat> matrix; // kept for residual checks
};

inline Factorization factorize(const SparseSystem& sys) {
    Factorization f;
    f.matrix = sys.matrix_;
    f.lu = std::make_shared<Eigen::SparseLU<SpMat>>();
    f.lu->compute(*f.matrix);
    if (f.lu->info() != Eigen::Success)
        throw Error("factorize: singular matrix (" + std::string(f.lu->lastErrorMessage()) + ")");
    return f;
}

inline DVec solve_with(const Factorization& f, const DVec& rhs, double residual_tol = 1e-10) {
    if (rhs.size() != f.matrix->rows())
        throw Error("solve: dimension mismatch (" + std::to_string(rhs.size()) + " rhs vs " +
                    std::to_string(f.matrix->rows()) + " matrix)");
    DVec x = f.lu->solve(rhs);
    if (f.lu->info() != Eigen::Success) throw Error("solve: back substitution failed");
    double res = (*f.matrix * x - rhs).norm() / std::max(1.0, rhs.norm());
    if (!(res <= residual_tol)) // negated so a NaN residual cannot slip through
        throw Error("solve: residual " + std::to_string(res) + " above tolerance " +
                    std::to_string(residual_tol));
    return x;
}

/// One-shot solve; returns the handle so callers with a constant matrix can
/// keep reusing the factorization.
inline std::pair<DVec, Factorization> solve(const SparseSystem& sys, double residual_tol = 1e-10) {
    Factorization f = factorize(sys);
    return {solve_with(f, sys.rhs, residual_tol), f};
}

} // namespace geotherm
