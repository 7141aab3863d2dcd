#pragma once

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace prony {

using cplx = std::complex<double>;

struct TorusDomain {
    int dimension = 1;
};
/// The unit sphere in R^3.
struct SphereDomain {};
using Domain = std::variant<TorusDomain, SphereDomain>;

/// Weighted point masses on [0,1)^d. Coefficients are complex and nonzero;
/// points are pairwise distinct (exact comparison of the coordinates).
class TorusEnsemble {
public:
    TorusEnsemble(int dimension, std::vector<Eigen::VectorXd> points, std::vector<cplx> coefficients);

    int dimension() const { return dimension_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Eigen::VectorXd>& points() const { return points_; }
    const std::vector<cplx>& coefficients() const { return coefficients_; }
    bool has_real_coefficients() const;

private:
    int dimension_;
    std::vector<Eigen::VectorXd> points_;
    std::vector<cplx> coefficients_;
};

/// Weighted point masses on the unit sphere S^2 with nonzero real coefficients.
class SphereEnsemble {
public:
    SphereEnsemble(std::vector<Eigen::Vector3d> points, std::vector<double> coefficients);

    std::size_t size() const { return points_.size(); }
    const std::vector<Eigen::Vector3d>& points() const { return points_; }
    const std::vector<double>& coefficients() const { return coefficients_; }

private:
    std::vector<Eigen::Vector3d> points_;
    std::vector<double> coefficients_;
};

/// Throws unless |x| = 1 within 1e-12.
void require_unit_vector(const Eigen::Vector3d& x);

/// Wrap-around l-infinity distance on the torus.
double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// Geodesic distance on S^2.
double sphere_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// min over j != l and integer shifts r of |t_j - t_l + r|_inf, in (0, 0.5].
double torus_separation(std::span<const Eigen::VectorXd> points);
/// min over j != l of arccos(x_j . x_l), in (0, pi].
double sphere_separation(std::span<const Eigen::Vector3d> points);

struct OrderBound {
    /// Least n with the support identified by the kernel of the moment matrix.
    int identification;
    /// Least n for which the Vandermonde matrix is guaranteed full rank.
    int full_rank;
};

/// Least integers strictly above n > d^{3/2}/q + d + 1 and n > sqrt(d)/q on
/// the torus, n > 7.5 pi/q + 1 and n > 7.5 pi/q on the sphere.
OrderBound required_order(double separation, const Domain& domain);

}  // namespace prony
