#pragma once

#include "hsg/convolution.hpp"

#include <array>
#include <string>
#include <vector>

namespace hsg {

// Unimodular exponential of the truncated wave convolution, scaled by the
// diverging renormalization constant: gamma_N exp(i eps0 beta Psi_N).
struct ChaosSample {
    int epsilon0 = 1;
    double beta = 0.0;
    RenormConstants rc;
    FrequencyLattice lattice;
    std::vector<double> times;
    std::vector<std::vector<cplx>> grid_values; // physical values per time slice
};

ChaosSample build_chaos(const ConvolutionPath& path, const RenormConstants& rc, double beta,
                        int epsilon0);

// sup_x | <grad>^{-alpha} theta(t, .) | for one physical slice.
double besov_slice_sup(const FrequencyLattice& lat, const std::vector<cplx>& slice, double alpha);

// Discrete proxy for the L^q_t W^{-alpha,inf}_x norm of a chaos sample.
double chaos_besov_norm(const ChaosSample& theta, double alpha, double q_time);

struct TwoPointResult {
    cplx mc{0.0, 0.0};
    double mc_se = 0.0;
    double analytic = 0.0;
};

// E[ Theta_N(z1) conj(Theta_N(z2)) ]: Monte Carlo over exact snapshots vs the
// Gaussian characteristic-function value
//   gamma_N^2 exp(-beta^2/2 (V(t1)+V(t2)) + beta^2 Gamma_N(z1,z2)).
TwoPointResult chaos_two_point(const FrequencyLattice& lat, double N, double beta2,
                               const std::array<double, 3>& z1, const std::array<double, 3>& z2,
                               int samples, std::uint64_t seed);

// 2p alternating-sign space-time charges; even indices carry +1.
struct ChargeConfiguration {
    std::vector<std::array<double, 3>> points; // (t, x1, x2)
};

struct ChargeReport {
    double log_lhs = 0.0;
    double log_rhs = 0.0;
    double ratio = 0.0; // lhs / rhs
};

// Interaction product prod_{j<k} J_N(z_j - z_k)^{eps_j eps_k lambda} against
// the dominant dipole pairing max over pairings of prod J_N(...)^{-lambda}.
ChargeReport charge_bound_check(const ChargeConfiguration& cfg, double N, double lambda);

struct BlowupReport {
    double beta2 = 0.0;
    std::vector<double> N_values;
    std::vector<double> second_moment;    // E | <phi, Theta_N> |^2
    std::vector<double> increment_ratio;  // value(N_k) / value(N_{k-1})
    double last_increment = 0.0;          // relative increment on the final doubling
};

// Smeared second moment of the chaos against a fixed space-time test
// function (a time bump, constant in space), evaluated analytically from the
// exact covariance.  Divergence in N signals the non-existence threshold.
BlowupReport blowup_probe(double beta2, const std::vector<double>& N_values, int gauss_points = 10);

struct SmoothingReport {
    double N = 0.0;
    double beta2 = 0.0;
    double eps = 0.0;
    std::vector<double> N0_values;
    std::vector<double> smoothed;      // E|X|^2 with the half-wave-inverse weight
    std::vector<double> smoothed_se;
    std::vector<double> unsmoothed;    // same moment without it
    std::vector<double> unsmoothed_se;
    double fitted_exponent_smoothed = 0.0;
    double fitted_exponent_unsmoothed = 0.0;
    double mod_floor = 0.0; // tau-grid floor applied near the cone (reported)
};

// Second moment of the time-restricted chaos after a spatial derivative, a
// dyadic projection at N0, and (for the smoothed variant) the fractional
// wave-operator inverse of order -1/2-eps applied on the space-time grid.
SmoothingReport smoothing_moment(double N, const std::vector<double>& N0_values, double beta2,
                                 double eps, int samples, std::uint64_t seed, int threads = 0);

} // namespace hsg
