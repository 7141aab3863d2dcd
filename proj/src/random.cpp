#include "prony/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace prony {

std::uint64_t CounterRng::next()
{
    ++counter_;
    std::uint64_t z = seed_ + counter_ * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::normal()
{
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

double coefficient_modulus(CounterRng& rng) { return 0.5 + rng.uniform(); }

double signed_modulus(CounterRng& rng)
{
    const double m = coefficient_modulus(rng);
    return rng.uniform() < 0.5 ? -m : m;
}

[[noreturn]] void give_up(int sparsity, double separation, double best)
{
    std::ostringstream os;
    os << "cannot place " << sparsity << " points with separation > " << separation << " after " << kMaxRejectionRounds
       << " rounds; largest achieved separation " << best;
    throw SeparationUnreachable(os.str(), best);
}

}  // namespace

TorusEnsemble simulate_torus(CounterRng& rng, int dimension, int sparsity, double separation, bool real_coefficients)
{
    if (dimension < 1) throw Error("torus dimension must be >= 1");
    if (sparsity < 1) throw Error("sparsity must be >= 1");
    if (separation < 0.0 || separation >= 0.5) throw Error("torus separation target must lie in [0, 0.5)");

    double best = 0.0;
    for (int round = 0; round < kMaxRejectionRounds; ++round) {
        std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(sparsity), Eigen::VectorXd(dimension));
        for (auto& t : pts)
            for (int a = 0; a < dimension; ++a) t[a] = rng.uniform();
        double achieved = 0.5;
        for (std::size_t j = 0; j < pts.size(); ++j)
            for (std::size_t l = 0; l < j; ++l) achieved = std::min(achieved, torus_distance(pts[j], pts[l]));
        best = std::max(best, achieved);
        if (!(achieved > separation) || achieved == 0.0) continue;

        std::vector<cplx> coeffs;
        for (int j = 0; j < sparsity; ++j) {
            if (real_coefficients) {
                coeffs.emplace_back(signed_modulus(rng), 0.0);
            } else {
                const double m = coefficient_modulus(rng);
                coeffs.push_back(std::polar(m, 2.0 * std::numbers::pi * rng.uniform()));
            }
        }
        return {dimension, std::move(pts), std::move(coeffs)};
    }
    give_up(sparsity, separation, best);
}

SphereEnsemble simulate_sphere(CounterRng& rng, int sparsity, double separation)
{
    if (sparsity < 1) throw Error("sparsity must be >= 1");
    if (separation < 0.0 || separation >= std::numbers::pi) throw Error("sphere separation target must lie in [0, pi)");

    double best = 0.0;
    for (int round = 0; round < kMaxRejectionRounds; ++round) {
        std::vector<Eigen::Vector3d> pts;
        for (int j = 0; j < sparsity; ++j) {
            Eigen::Vector3d g;
            do {
                g = {rng.normal(), rng.normal(), rng.normal()};
            } while (g.norm() < 1e-8);
            pts.push_back(g.normalized());
        }
        double achieved = std::numbers::pi;
        for (std::size_t j = 0; j < pts.size(); ++j)
            for (std::size_t l = 0; l < j; ++l) achieved = std::min(achieved, sphere_distance(pts[j], pts[l]));
        best = std::max(best, achieved);
        if (!(achieved > separation) || achieved <= 1e-12) continue;

        std::vector<double> coeffs;
        for (int j = 0; j < sparsity; ++j) coeffs.push_back(signed_modulus(rng));
        return {std::move(pts), std::move(coeffs)};
    }
    give_up(sparsity, separation, best);
}

}  // namespace prony
