#include "prony/moments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "prony/error.hpp"
#include "prony/harmonics.hpp"

namespace prony {

TorusMoments::TorusMoments(int dimension, int order, std::vector<cplx> values)
    : indices_(IndexSet::symmetric_box(dimension, order)), values_(std::move(values))
{
    if (values_.size() != indices_.size())
        throw Error("torus moment table has " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(indices_.size()));
}

TorusMoments TorusMoments::from_entries(int dimension, int order, const std::map<MultiIndex, cplx>& entries)
{
    const auto box = IndexSet::symmetric_box(dimension, order);
    std::vector<cplx> values(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        auto it = entries.find(box[i]);
        if (it == entries.end()) throw Error("moment table is missing index " + to_string(box[i]));
        values[i] = it->second;
    }
    return {dimension, order, std::move(values)};
}

std::optional<cplx> TorusMoments::find(const MultiIndex& k) const
{
    auto pos = indices_.position(k);
    if (!pos) return std::nullopt;
    return values_[*pos];
}

cplx TorusMoments::at(const MultiIndex& k) const
{
    auto v = find(k);
    if (!v) throw Error("moment table is missing index " + to_string(k));
    return *v;
}

bool TorusMoments::is_conjugate_symmetric(double tol) const
{
    // row-major order over a symmetric box: index i and size-1-i are k and -k
    const std::size_t n = values_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(values_[i] - std::conj(values_[n - 1 - i])) > tol) return false;
    return true;
}

SphereMoments::SphereMoments(int degree, std::vector<double> values) : degree_(degree), values_(std::move(values))
{
    if (degree < 0) throw Error("moment degree must be >= 0");
    if (values_.size() != harmonic_count(degree))
        throw Error("sphere moment table has " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(harmonic_count(degree)));
}

SphereMoments SphereMoments::from_entries(int degree, const std::map<std::pair<int, int>, double>& entries)
{
    std::vector<double> values(harmonic_count(degree));
    for (int k = 0; k <= degree; ++k)
        for (int l = 1; l <= 2 * k + 1; ++l) {
            auto it = entries.find({k, l});
            if (it == entries.end())
                throw Error("moment table is missing index (" + std::to_string(k) + "," + std::to_string(l) + ")");
            values[harmonic_position(k, l)] = it->second;
        }
    return {degree, std::move(values)};
}

double SphereMoments::at(int k, int l) const
{
    if (k < 0 || k > degree_ || l < 1 || l > 2 * k + 1)
        throw Error("moment table is missing index (" + std::to_string(k) + "," + std::to_string(l) + ")");
    return values_[harmonic_position(k, l)];
}

TorusMoments torus_moments(const TorusEnsemble& ensemble, int n)
{
    if (n < 0) throw Error("moment order must be >= 0");
    const int d = ensemble.dimension();
    const auto box = IndexSet::symmetric_box(d, n);
    std::vector<cplx> values(box.size(), cplx(0.0));
    const std::size_t side = static_cast<std::size_t>(2 * n + 1);

    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        const auto& t = ensemble.points()[j];
        // per-axis factors exp(2 pi i k t_a), k = -n..n
        std::vector<std::vector<cplx>> axis(static_cast<std::size_t>(d), std::vector<cplx>(side));
        for (int a = 0; a < d; ++a)
            for (int k = -n; k <= n; ++k)
                axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(k + n)] =
                    std::polar(1.0, 2.0 * std::numbers::pi * k * t[a]);
        const cplx c = ensemble.coefficients()[j];
        for (std::size_t i = 0; i < box.size(); ++i) {
            cplx term = c;
            for (int a = 0; a < d; ++a)
                term *= axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(box[i][static_cast<std::size_t>(a)] + n)];
            values[i] += term;
        }
    }
    return {d, n, std::move(values)};
}

SphereMoments sphere_moments(const SphereEnsemble& ensemble, int n)
{
    if (n < 0) throw Error("moment degree must be >= 0");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(harmonic_count(n)));
    for (std::size_t j = 0; j < ensemble.size(); ++j)
        sum += ensemble.coefficients()[j] * eval_harmonics(n, ensemble.points()[j]);
    return {n, std::vector<double>(sum.data(), sum.data() + sum.size())};
}

}  // namespace prony
