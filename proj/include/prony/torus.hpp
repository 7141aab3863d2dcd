#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "prony/ensemble.hpp"
#include "prony/index_set.hpp"
#include "prony/linalg.hpp"
#include "prony/moments.hpp"

namespace prony {

/// Nonequispaced Fourier matrix (exp(2 pi i k . t_j))_{j, k in {0..n}^d}.
struct FourierMatrix {
    IndexSet columns;
    Eigen::MatrixXcd values;
};

FourierMatrix assemble_fourier(std::span<const Eigen::VectorXd> points, int n);

/// Multilevel Toeplitz moment matrix (f(k - l))_{k,l in {0..n}^d}.
///
/// Entries are looked up in the moment table; nothing is recomputed from an
/// ensemble. Up to kDenseLimit rows the matrix is held densely; above that
/// it is applied matrix-free and its kernel is found from a range sketch.
class ToeplitzMatrix {
public:
    static constexpr Eigen::Index kDenseLimit = 1024;

    const IndexSet& indices() const { return indices_; }
    int order() const { return indices_.order(); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(indices_.size()); }
    bool is_dense() const { return dense_.size() > 0; }

    cplx entry(Eigen::Index row, Eigen::Index col) const;
    Eigen::MatrixXcd dense() const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;
    Eigen::MatrixXcd apply_adjoint(const Eigen::MatrixXcd& x) const;

    /// Numerical kernel (dense SVD or sketch, depending on size).
    KernelBasis<cplx> kernel(double rank_tolerance = kDefaultRankTolerance) const;

private:
    friend ToeplitzMatrix assemble_toeplitz(const TorusMoments& moments, int n);
    ToeplitzMatrix(const TorusMoments& moments, int n);

    IndexSet indices_;
    std::vector<cplx> moments_;          // table values, row-major over its symmetric box
    std::vector<std::ptrdiff_t> offset_;  // linear offset of each row index in the table's radix
    std::ptrdiff_t center_ = 0;
    Eigen::MatrixXcd dense_;
};

/// T_n from a table covering at least {-n..n}^d; otherwise throws naming a
/// missing index.
ToeplitzMatrix assemble_toeplitz(const TorusMoments& moments, int n);
inline ToeplitzMatrix assemble_toeplitz(const TorusMoments& moments) { return assemble_toeplitz(moments, moments.order()); }

/// F_n^T diag(c) conj(F_n) built from ground truth; this equals (f(k - l))
/// for f(k) = sum_j c_j exp(2 pi i k . t_j). For tests and diagnostics only.
Eigen::MatrixXcd toeplitz_from_factorization(const TorusEnsemble& ensemble, int n);

struct CoefficientFit {
    std::vector<cplx> coefficients;
    double residual_norm = 0.0;
    double relative_residual = 0.0;
};

/// Least-squares coefficients for a given support from the moments over
/// {-n..n}^d. Throws "coefficient system rank-deficient" if the points cannot
/// be told apart at this order.
CoefficientFit recover_coefficients(std::span<const Eigen::VectorXd> points, const TorusMoments& moments, int n);

}  // namespace prony
