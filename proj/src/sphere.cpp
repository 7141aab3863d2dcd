#include "prony/sphere.hpp"

#include <string>

#include <Eigen/QR>

#include "prony/error.hpp"
#include "prony/harmonics.hpp"

namespace prony {

SphericalMomentMatrix assemble_spherical_moment_matrix(const SphereMoments& moments, int n, const GauntTable& gaunt)
{
    if (n < 0) throw Error("moment matrix order must be >= 0");
    if (moments.degree() < 2 * n)
        throw Error("moment table reaches degree " + std::to_string(moments.degree()) + ", order " + std::to_string(n) +
                    " requires degree " + std::to_string(2 * n));
    if (gaunt.max_degree() < n) throw Error("Gaunt table degree is below the matrix order");

    const auto size = static_cast<Eigen::Index>(harmonic_count(n));
    const auto f = moments.values();
    SphericalMomentMatrix h{n, Eigen::MatrixXd(size, size)};
    for (Eigen::Index j = 0; j < size; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
            double sum = 0.0;
            for (const auto& e : gaunt.products(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) sum += e.value * f[e.target];
            h.values(i, j) = sum;
            h.values(j, i) = sum;
        }
    return h;
}

Eigen::MatrixXd spherical_factorization(const SphereEnsemble& ensemble, int n)
{
    const auto y = assemble_spherical_fourier(ensemble.points(), n);
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(ensemble.coefficients().data(), static_cast<Eigen::Index>(ensemble.size()));
    return y.values.transpose() * c.asDiagonal() * y.values;
}

SphereCoefficientFit recover_sphere_coefficients(std::span<const Eigen::Vector3d> points, const SphereMoments& moments)
{
    if (points.empty()) throw Error("no support points given");
    const Eigen::MatrixXd system = assemble_spherical_fourier(points, moments.degree()).values.transpose();
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(moments.values().data(), static_cast<Eigen::Index>(moments.values().size()));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
    qr.setThreshold(1e-10);
    if (qr.rank() < system.cols()) throw NotIdentifiable("coefficient system rank-deficient");
    const Eigen::VectorXd sol = qr.solve(rhs);

    SphereCoefficientFit fit;
    fit.coefficients.assign(sol.data(), sol.data() + sol.size());
    fit.residual_norm = (system * sol - rhs).norm();
    fit.relative_residual = rhs.norm() > 0.0 ? fit.residual_norm / rhs.norm() : fit.residual_norm;
    return fit;
}

}  // namespace prony
