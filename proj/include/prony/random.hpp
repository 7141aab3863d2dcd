#pragma once

#include <cstdint>

#include "prony/ensemble.hpp"
#include "prony/error.hpp"

namespace prony {

/// Counter-based 64-bit generator: the i-th output (i = 1, 2, ...) is the
/// SplitMix64 finalizer applied to seed + i * 0x9E3779B97F4A7C15.
/// uniform() takes the top 53 bits; normal() is Box-Muller on two uniforms
/// (u1 replaced by 1 - u1 to avoid log(0)), producing one value per call.
/// The stream is fully specified here so that other implementations can
/// reproduce it bit for bit.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next();
    double uniform();  ///< [0, 1)
    double normal();
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Raised when rejection sampling gives up.
class SeparationUnreachable : public Error {
public:
    SeparationUnreachable(const std::string& what, double best) : Error(what), best_separation(best) {}
    double best_separation;
};

inline constexpr int kMaxRejectionRounds = 100000;

/// M uniform points on [0,1)^d whose separation exceeds `separation`
/// (0 disables the constraint). Coefficients have modulus in [0.5, 1.5] and
/// uniform phase, or a random sign when `real_coefficients` is set.
/// Each round draws a whole point set; throws SeparationUnreachable after
/// kMaxRejectionRounds rounds.
TorusEnsemble simulate_torus(CounterRng& rng, int dimension, int sparsity, double separation, bool real_coefficients = false);

/// M points uniform on S^2 (normalized Gaussian triples) with geodesic
/// separation above `separation`; real coefficients with modulus in
/// [0.5, 1.5] and random sign.
SphereEnsemble simulate_sphere(CounterRng& rng, int sparsity, double separation);

}  // namespace prony
