#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "prony/ensemble.hpp"
#include "prony/index_set.hpp"

namespace prony {

/// Trigonometric moments f(k) over the full symmetric box {-n..n}^d, stored
/// in the box's row-major order.
class TorusMoments {
public:
    TorusMoments(int dimension, int order, std::vector<cplx> values);

    /// Builds a table from explicit entries; throws naming the first missing
    /// index of the symmetric box.
    static TorusMoments from_entries(int dimension, int order, const std::map<MultiIndex, cplx>& entries);

    int dimension() const { return indices_.dimension(); }
    int order() const { return indices_.order(); }
    const IndexSet& indices() const { return indices_; }
    std::span<const cplx> values() const { return values_; }

    /// Throws for an index outside the table.
    cplx at(const MultiIndex& k) const;
    std::optional<cplx> find(const MultiIndex& k) const;

    /// Moments of an ensemble are conjugate symmetric exactly when its
    /// coefficients are real.
    bool is_conjugate_symmetric(double tol) const;

private:
    IndexSet indices_;
    std::vector<cplx> values_;
};

/// Spherical harmonic moments f(k, l) for all degrees k <= n, stored at
/// harmonic_position(k, l).
class SphereMoments {
public:
    SphereMoments(int degree, std::vector<double> values);

    /// Throws naming the first missing (k, l).
    static SphereMoments from_entries(int degree, const std::map<std::pair<int, int>, double>& entries);

    int degree() const { return degree_; }
    std::span<const double> values() const { return values_; }
    double at(int k, int l) const;

private:
    int degree_;
    std::vector<double> values_;
};

/// f(k) = sum_j c_j exp(2 pi i k . t_j) for k in {-n..n}^d.
TorusMoments torus_moments(const TorusEnsemble& ensemble, int n);

/// f(k, l) = sum_j c_j Y_k^l(x_j) for k <= n.
SphereMoments sphere_moments(const SphereEnsemble& ensemble, int n);

}  // namespace prony
