#pragma once

#include "hsg/lattice.hpp"
#include "hsg/rng.hpp"

#include <cstdint>

namespace hsg {

// Free-field position/velocity pair: mode n of u0 has variance <n>^{-2},
// mode n of v0 has variance 1, independent across modes under the Hermitian
// pairing (the zero mode is real).
struct GaussianPair {
    SpectralField u0;
    SpectralField v0;
};

// Descriptor of a cylindrical Wiener path on the lattice, resolved lazily:
// increment j of mode n is regenerated on demand from the counter-based
// stream, so paths are reproducible and need no storage.
struct NoisePath {
    std::uint64_t seed = 0;
    double dt = 0.0;
    int steps = 0;
    double amplitude = 1.0; // 0 disables the forcing

    NoisePath() = default;
    NoisePath(std::uint64_t seed_, double dt_, int steps_, double amplitude_ = 1.0)
        : seed(seed_), dt(dt_), steps(steps_), amplitude(amplitude_) {
        if (dt <= 0.0 || steps < 0) throw std::invalid_argument("NoisePath: invalid grid");
    }

    double horizon() const { return dt * steps; }

    // Brownian increment of mode n over [j dt, (j+1) dt); Var = dt, the zero
    // mode is real, and the (-n) increment is the conjugate.
    cplx increment(int n1, int n2, int j) const;
};

struct RenormConstants {
    double N = 0.0;
    double beta2 = 0.0;
    double sigma_N = 0.0;
    double gamma_N = 1.0;
};

// Draws (u0, v0) from the free-field pair law.  Deterministic in
// (seed, lattice); mode draws are order-independent.
GaussianPair sample_gaussian_pair(const FrequencyLattice& lat, std::uint64_t seed);

// sigma_N = (2*pi)^{-2} sum_n chi_N(n)^2 <n>^{-2}, an exact finite sum.
// Requires the lattice to resolve the cutoff.
double compute_sigma_n(const FrequencyLattice& lat, double N);

// gamma_N = exp(beta2 * sigma_N / 2).  Throws on overflow saturation.
RenormConstants compute_renorm_constants(const FrequencyLattice& lat, double N, double beta2);

// Renormalized interaction density
//   R_N(u) = (gamma_N * gamma / beta) * integral of cos(beta * P_N u)
// by collocation quadrature on the (2x-oversampled) grid.
double gibbs_density_rn(const SpectralField& u, const RenormConstants& rc, double gamma_coupling,
                        double beta);

} // namespace hsg
