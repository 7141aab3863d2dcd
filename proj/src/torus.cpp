#include "prony/torus.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "prony/error.hpp"

namespace prony {

namespace {

// exp(2 pi i k . t) for every k of the index set
Eigen::VectorXcd exponential_row(const IndexSet& indices, const Eigen::VectorXd& t)
{
    const int d = indices.dimension();
    const int lo = indices.shape() == IndexShape::SymmetricBox ? -indices.order() : 0;
    const int side = indices.order() - lo + 1;
    std::vector<std::vector<cplx>> axis(static_cast<std::size_t>(d), std::vector<cplx>(static_cast<std::size_t>(side)));
    for (int a = 0; a < d; ++a)
        for (int k = lo; k <= indices.order(); ++k)
            axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(k - lo)] = std::polar(1.0, 2.0 * std::numbers::pi * k * t[a]);

    Eigen::VectorXcd row(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        cplx v = 1.0;
        for (int a = 0; a < d; ++a)
            v *= axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(indices[i][static_cast<std::size_t>(a)] - lo)];
        row[static_cast<Eigen::Index>(i)] = v;
    }
    return row;
}

void require_points(std::span<const Eigen::VectorXd> points, int d)
{
    for (const auto& t : points)
        if (t.size() != d) throw Error("point dimension does not match the moment table");
}

}  // namespace

FourierMatrix assemble_fourier(std::span<const Eigen::VectorXd> points, int n)
{
    if (points.empty()) throw Error("Fourier matrix needs at least one point");
    const int d = static_cast<int>(points.front().size());
    require_points(points, d);
    FourierMatrix f{IndexSet::box(d, n), {}};
    f.values.resize(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(f.columns.size()));
    for (std::size_t j = 0; j < points.size(); ++j)
        f.values.row(static_cast<Eigen::Index>(j)) = exponential_row(f.columns, points[j]).transpose();
    return f;
}

ToeplitzMatrix::ToeplitzMatrix(const TorusMoments& moments, int n)
    : indices_(IndexSet::box(moments.dimension(), n)), moments_(moments.values().begin(), moments.values().end())
{
    const int d = moments.dimension();
    const std::ptrdiff_t radix = 2 * moments.order() + 1;
    for (int a = 0; a < d; ++a) center_ = center_ * radix + moments.order();
    offset_.resize(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        std::ptrdiff_t off = 0;
        for (int e : indices_[i].entries) off = off * radix + e;
        offset_[i] = off;
    }
    if (size() <= kDenseLimit) dense_ = dense();
}

ToeplitzMatrix assemble_toeplitz(const TorusMoments& moments, int n)
{
    if (n < 0) throw Error("Toeplitz order must be >= 0");
    if (n > moments.order()) {
        const MultiIndex missing(std::vector<int>(static_cast<std::size_t>(moments.dimension()), -n));
        throw Error("moment table is missing index " + to_string(missing) + " required for order " + std::to_string(n));
    }
    return ToeplitzMatrix(moments, n);
}

cplx ToeplitzMatrix::entry(Eigen::Index row, Eigen::Index col) const
{
    return moments_[static_cast<std::size_t>(center_ + offset_[static_cast<std::size_t>(row)] - offset_[static_cast<std::size_t>(col)])];
}

Eigen::MatrixXcd ToeplitzMatrix::dense() const
{
    if (is_dense()) return dense_;
    Eigen::MatrixXcd t(size(), size());
    for (Eigen::Index c = 0; c < size(); ++c)
        for (Eigen::Index r = 0; r < size(); ++r) t(r, c) = entry(r, c);
    return t;
}

Eigen::MatrixXcd ToeplitzMatrix::apply(const Eigen::MatrixXcd& x) const
{
    if (x.rows() != size()) throw Error("operand size mismatch");
    if (is_dense()) return dense_ * x;
    Eigen::MatrixXcd out(size(), x.cols());
    Eigen::RowVectorXcd row(size());
    for (Eigen::Index r = 0; r < size(); ++r) {
        for (Eigen::Index c = 0; c < size(); ++c) row[c] = entry(r, c);
        out.row(r).noalias() = row * x;
    }
    return out;
}

Eigen::MatrixXcd ToeplitzMatrix::apply_adjoint(const Eigen::MatrixXcd& x) const
{
    if (x.rows() != size()) throw Error("operand size mismatch");
    if (is_dense()) return dense_.adjoint() * x;
    Eigen::MatrixXcd out(size(), x.cols());
    Eigen::RowVectorXcd row(size());
    for (Eigen::Index r = 0; r < size(); ++r) {
        for (Eigen::Index c = 0; c < size(); ++c) row[c] = std::conj(entry(c, r));
        out.row(r).noalias() = row * x;
    }
    return out;
}

KernelBasis<cplx> ToeplitzMatrix::kernel(double rank_tolerance) const
{
    if (is_dense()) return numerical_kernel<cplx>(dense_, rank_tolerance);
    return sketched_kernel(
        size(), size(), [this](const Eigen::MatrixXcd& x) { return apply(x); },
        [this](const Eigen::MatrixXcd& x) { return apply_adjoint(x); }, rank_tolerance);
}

Eigen::MatrixXcd toeplitz_from_factorization(const TorusEnsemble& ensemble, int n)
{
    const auto f = assemble_fourier(ensemble.points(), n);
    Eigen::VectorXcd c(static_cast<Eigen::Index>(ensemble.size()));
    for (std::size_t j = 0; j < ensemble.size(); ++j) c[static_cast<Eigen::Index>(j)] = ensemble.coefficients()[j];
    return f.values.transpose() * c.asDiagonal() * f.values.conjugate();
}

CoefficientFit recover_coefficients(std::span<const Eigen::VectorXd> points, const TorusMoments& moments, int n)
{
    if (points.empty()) throw Error("no support points given");
    if (n < 0 || n > moments.order()) throw Error("moment table does not cover order " + std::to_string(n));
    require_points(points, moments.dimension());

    const auto rows = IndexSet::symmetric_box(moments.dimension(), n);
    Eigen::MatrixXcd system(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) system.col(static_cast<Eigen::Index>(j)) = exponential_row(rows, points[j]);
    Eigen::VectorXcd rhs(system.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = moments.at(rows[i]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(system);
    qr.setThreshold(1e-10);
    if (qr.rank() < system.cols()) throw NotIdentifiable("coefficient system rank-deficient");
    const Eigen::VectorXcd sol = qr.solve(rhs);

    CoefficientFit fit;
    fit.coefficients.assign(sol.data(), sol.data() + sol.size());
    fit.residual_norm = (system * sol - rhs).norm();
    fit.relative_residual = rhs.norm() > 0.0 ? fit.residual_norm / rhs.norm() : fit.residual_norm;
    return fit;
}

}  // namespace prony
