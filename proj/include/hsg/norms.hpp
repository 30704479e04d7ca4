#pragma once

#include "hsg/spacetime.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hsg {

struct NormParams {
    double s = 0.0; // spatial regularity
    double b = 0.0; // modulation / temporal regularity
    double a = 0.0; // time-weight exponent (Y only)
    double p = 2.0; // Lebesgue exponent (Lambda only; may be inf)
};

enum class SpaceTimeNormKind { X, Y, Lambda };

// Discrete space-time norms.
//  X:      || <n>^s <|tau|-|n|>^b u_hat ||_{l^2_n L^2_tau}
//  Y:      || <t>^a F^{-1}[ <n>^s ||tau|-|n||^b u_hat ] ||_{L^2_{t,x}}
//  Lambda: || <grad>^s <d_t>^b u ||_{L^p_{t,x}}
// Throws "modulation underresolved" for Y with b < 0 when a non-negligible
// energy fraction sits below the tau-grid modulation resolution.
double spacetime_norm(const SpaceTimeField& u, SpaceTimeNormKind kind, const NormParams& prm);

// Signed modulation weight q_b * | tau^2 - |n|^2 |^b of the fractional
// d'Alembertian.  For b < 0 the modulation factor is floored at dtau/2
// (exact cone hits on the grid), consistently for all powers.
cplx box_symbol(double tau, double rho, double b, double mod_floor);

SpaceTimeField apply_box_power(const SpaceTimeField& u, double b);

// Dyadic space-time blocks near the cone.
struct ConeBlockSpec {
    double N = 1.0; // spatial annulus
    double R = 1.0; // temporal annulus
    double L = 1.0; // modulation shell
    double b = 0.0; // modulation power
};

enum class ConePrefix { Id, C, HC }; // optional sharp cone cutoff / Hilbert transform

SpaceTimeField apply_cone_block(const SpaceTimeField& u, const ConeBlockSpec& spec,
                                ConePrefix prefix);

// Spatial dyadic-block projection P_K of a static field (lowest block is a
// low-pass so the blocks sum to the identity on the lattice).
SpectralField dyadic_block(const SpectralField& u, double K, double K_min);

// gamma-paraproduct: the part of u*v with N1 >= N2^gamma (high==true) or
// N1 < N2^gamma (high==false), evaluated on the collocation grid.
RealField2D paraproduct(const SpectralField& u, const SpectralField& v, double gamma, bool high);

// Empirical check of the weighted cone-multiplier bound: max over random
// windowed signals of ||<t>^a A C^b u|| divided by the two-term envelope.
struct WeightedConeReport {
    std::vector<double> L_values;
    std::vector<double> max_ratio;      // vs the envelope, per L
    std::vector<double> raw_gain;       // ||<t>^a C u|| / ||<t>^a u||, worst case
    double fitted_ratio_exponent = 0.0; // slope of log max_ratio vs log L
    double max_overall = 0.0;
};

WeightedConeReport weighted_cone_probe(double a, double b, const std::vector<double>& L_values,
                                       int num_fields, std::uint64_t seed);

// Empirical constant in the cone-modulation triangle inequality
//   ||tau|-|xi|| <= C ( |-tau1 +- |xi1|| + |-tau2 +- |xi2|| + min(|xi1|,|xi2|) ).
struct LeibnizReport {
    double max_c = 0.0;
    std::size_t samples = 0;
    double max_c_null = 0.0; // over exactly-null configurations
};

LeibnizReport hyperbolic_leibniz_check(std::size_t num_samples, std::uint64_t seed);

} // namespace hsg
