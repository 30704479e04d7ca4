#pragma once

#include "hsg/random_fields.hpp"

#include <array>
#include <vector>

namespace hsg {

enum class ConvKind { kg, wave };

// Per-mode state of the damped second-order evolution
//   x'' + x' + (1/4 + w^2) x = sqrt(2) dB,
// where w = (3/4+|n|^2)^(1/2) (kg) or |n| (wave).  Characteristic roots are
// -1/2 +/- i w, so the transition over a step is exact.
struct ModeOUState {
    int n1 = 0, n2 = 0;
    cplx pos{0.0, 0.0};
    cplx vel{0.0, 0.0};
    double clock = 0.0;
};

// Exact one-step algebra for a mode of frequency w over step h:
//  - (a..): homogeneous 2x2 transition,
//  - (b1,b2): left-point noise kernels sqrt(2)*(D(h), D'(h)),
//  - (l..): Cholesky factor of the exact noise covariance
//           Q = 2 * int_0^h (D(s), D'(s))^T (D(s), D'(s)) ds.
struct ModeTransition {
    double a11, a12, a21, a22;
    double b1, b2;
    double l11, l21, l22;
};

ModeTransition mode_transition(double w, double h);

// Raw noise covariance entries (exposed for tests).
void mode_noise_covariance(double w, double h, double& q11, double& q12, double& q22);

// Time-indexed samples of a stochastic convolution.  Fields are stored
// untruncated (all pairable lattice modes); `truncated` applies the level-N
// projection that defines the observable path.
struct ConvolutionPath {
    ConvKind kind = ConvKind::kg;
    double N = 0.0;
    std::vector<double> times;
    std::vector<SpectralField> raw_fields;

    SpectralField truncated(std::size_t i) const;
};

// Evolves the damped linear equation with data `data` driven by `noise`
// (left-point rule with exact per-step kernels), recording the field at each
// t in t_grid.  Times must be increasing multiples of noise.dt within the
// noise horizon.
ConvolutionPath evolve_convolution(const GaussianPair& data, const NoisePath& noise, ConvKind kind,
                                   double N, const std::vector<double>& t_grid);

// Pathwise difference of two convolutions coupled by the same noise,
// truncated at their common level.
std::vector<SpectralField> convolution_difference(const ConvolutionPath& pkg,
                                                  const ConvolutionPath& pwave);

// Exact-in-distribution joint snapshots of the convolution at fixed times:
// per mode, free-field data followed by exact Gaussian transitions
// (homogeneous propagation plus Cholesky noise).  No time-stepping error.
// Only modes inside the cutoff disc are carried.
class SnapshotSampler {
public:
    SnapshotSampler(const FrequencyLattice& lat, ConvKind kind, double N,
                    std::vector<double> times);

    // Raw mode values (no cutoff weight applied), one field per time.
    std::vector<SpectralField> sample(std::uint64_t seed) const;

    // Values of the truncated field Psi_N at the registered points;
    // out[k * npoints + p] = Psi_N(times[k], points[p]).
    void set_points(const std::vector<std::array<double, 2>>& points);
    void sample_points(std::uint64_t seed, std::vector<double>& out) const;

    std::size_t num_times() const { return times_.size(); }
    std::size_t num_points() const { return points_.size(); }
    const FrequencyLattice& lattice() const { return lat_; }

private:
    struct Mode {
        int n1, n2;
        double chi;
        double inv_jb;
        int tr_index;
        bool zero;
    };
    FrequencyLattice lat_;
    ConvKind kind_;
    double N_;
    std::vector<double> times_;
    std::vector<Mode> modes_;
    std::vector<ModeTransition> transitions_; // [tr_index * ntimes + k]
    std::vector<std::array<double, 2>> points_;
    std::vector<cplx> phases_; // [mode * npoints + p]
};

std::vector<SpectralField> sample_convolution_snapshots(const FrequencyLattice& lat,
                                                        std::uint64_t seed, ConvKind kind, double N,
                                                        const std::vector<double>& times);

// Closed-form per-mode covariance E[psi(t1,n) conj(psi(t2,n))] of the
// convolution mode with frequency w and data weight <n>^2 = hn2.
double mode_covariance(double w, double hn2, double t1, double t2);

enum class CovMode { analytic_sum, monte_carlo };

// Space-time covariance of the truncated wave convolution:
//   Gamma_N(t1,t2,x) = E[Psi_N(t1,x) Psi_N(t2,0)].
// analytic_sum evaluates the exact lattice sum of mode covariances;
// monte_carlo averages products of exact snapshots.
double covariance_gamma(const FrequencyLattice& lat, double N, double t1, double t2,
                        const std::array<double, 2>& x, CovMode mode, std::uint64_t seed = 1,
                        int samples = 0);

// All lattice values of Gamma_N(t1,t2,.) in one transform (for quadratures
// over the spatial offset).
RealField2D covariance_gamma_grid(const FrequencyLattice& lat, double N, double t1, double t2,
                                  ConvKind kind = ConvKind::wave);

} // namespace hsg
