#include "prony/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "prony/error.hpp"

namespace prony {

TorusEnsemble::TorusEnsemble(int dimension, std::vector<Eigen::VectorXd> points, std::vector<cplx> coefficients)
    : dimension_(dimension), points_(std::move(points)), coefficients_(std::move(coefficients))
{
    if (dimension < 1) throw Error("torus dimension must be >= 1");
    if (points_.empty()) throw Error("ensemble must contain at least one point");
    if (points_.size() != coefficients_.size()) throw Error("point and coefficient counts differ");
    for (std::size_t j = 0; j < points_.size(); ++j) {
        const auto& t = points_[j];
        if (t.size() != dimension) throw Error("torus point " + std::to_string(j) + " has wrong dimension");
        for (double c : t)
            if (!(c >= 0.0 && c < 1.0)) throw Error("torus point " + std::to_string(j) + " has a coordinate outside [0,1)");
        if (coefficients_[j] == cplx(0.0)) throw Error("coefficient " + std::to_string(j) + " is zero");
        for (std::size_t l = 0; l < j; ++l)
            if (points_[l] == t) throw Error("duplicate torus points " + std::to_string(l) + " and " + std::to_string(j));
    }
}

bool TorusEnsemble::has_real_coefficients() const
{
    return std::all_of(coefficients_.begin(), coefficients_.end(), [](cplx c) { return c.imag() == 0.0; });
}

void require_unit_vector(const Eigen::Vector3d& x)
{
    if (!(std::abs(x.norm() - 1.0) <= 1e-12)) throw Error("point is not on the unit sphere");
}

SphereEnsemble::SphereEnsemble(std::vector<Eigen::Vector3d> points, std::vector<double> coefficients)
    : points_(std::move(points)), coefficients_(std::move(coefficients))
{
    if (points_.empty()) throw Error("ensemble must contain at least one point");
    if (points_.size() != coefficients_.size()) throw Error("point and coefficient counts differ");
    for (std::size_t j = 0; j < points_.size(); ++j) {
        require_unit_vector(points_[j]);
        if (coefficients_[j] == 0.0) throw Error("coefficient " + std::to_string(j) + " is zero");
        for (std::size_t l = 0; l < j; ++l)
            if ((points_[l] - points_[j]).norm() <= 1e-12)
                throw Error("duplicate sphere points " + std::to_string(l) + " and " + std::to_string(j));
    }
}

double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    double m = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double diff = std::abs(a[i] - b[i]);
        diff -= std::floor(diff);
        m = std::max(m, std::min(diff, 1.0 - diff));
    }
    return m;
}

double sphere_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    // atan2 form stays accurate for nearly equal and nearly antipodal pairs.
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

double torus_separation(std::span<const Eigen::VectorXd> points)
{
    if (points.size() < 2) throw Error("separation undefined for fewer than two points");
    double sep = 1.0;
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t l = 0; l < j; ++l) sep = std::min(sep, torus_distance(points[j], points[l]));
    if (sep == 0.0) throw Error("duplicate points: separation is zero");
    return sep;
}

double sphere_separation(std::span<const Eigen::Vector3d> points)
{
    if (points.size() < 2) throw Error("separation undefined for fewer than two points");
    double sep = std::numbers::pi;
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t l = 0; l < j; ++l) sep = std::min(sep, sphere_distance(points[j], points[l]));
    if (sep <= 1e-12) throw Error("duplicate points: separation is zero");
    return sep;
}

namespace {

// Least integer n with n > bound. A bound that is an integer up to rounding
// counts as that integer, so 16.000000000000004 and 15.999999999999998 both
// give 17.
int least_above(double bound)
{
    const double r = std::round(bound);
    if (std::abs(bound - r) <= 1e-9 * std::max(1.0, std::abs(bound))) return static_cast<int>(r) + 1;
    return static_cast<int>(std::floor(bound)) + 1;
}

}  // namespace

OrderBound required_order(double separation, const Domain& domain)
{
    if (!(separation > 0.0)) throw Error("separation must be positive");
    if (const auto* torus = std::get_if<TorusDomain>(&domain)) {
        const double d = torus->dimension;
        if (d < 1) throw Error("torus dimension must be >= 1");
        return {least_above(std::pow(d, 1.5) / separation + d + 1.0), least_above(std::sqrt(d) / separation)};
    }
    const double d = 3.0;
    const double vandermonde = 2.5 * std::numbers::pi * d / separation;
    return {least_above(vandermonde + 1.0), least_above(vandermonde)};
}

}  // namespace prony
