#pragma once

#include "hsg/lattice.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hsg {

// Closed-form singular kernels on the torus / plane.
struct KernelSpec {
    enum class Kind {
        green,      // Green's function of 1 - Laplacian on the torus
        bessel,     // kernel of <grad>^{-alpha}, 0 < alpha < 2
        wave,       // forward wave kernel 1_{|x|<t} / sqrt(t^2-|x|^2)
        hyp_riesz,  // c_b 1_{t>=0} 1_{|x|<t} (t^2-|x|^2)^{-3/2-b}, b < -1/2
        potential   // |t| + |x|_{T^2} + 1/N
    };
    Kind kind = Kind::green;
    double alpha = 1.0;
    double b = -0.75;
    double N = 16.0;
    double c_b = 1.0;
};

// Pointwise evaluation at (t, x); t is ignored by the elliptic kernels.
// Requests on the kernel's singular set are rejected.
double eval_kernel(const KernelSpec& spec, double t, const std::array<double, 2>& x);

// Green's function of 1 - Laplacian on the torus and its first/second
// derivatives, by exponentially convergent image sums of Bessel-K kernels.
double green_torus(const std::array<double, 2>& x);
double green_torus_deriv(const std::array<double, 2>& x, int d1, int d2);

// Fits the physical-kernel normalization c_b of the fractional wave inverse
// by matching the spectral symbol action on a smooth time bump.
double fit_box_constant(double b);

// Numerically checked kernel-convolution bounds.
enum class KernelLemma {
    point_singularity,  // |y|^{-theta} convolved with the projector kernel
    green_derivatives,  // smoothed Green's function and derivatives
    cone_singularity,   // |t - |y||^{-gamma} convolved with the projector kernel
    wave_times_green    // wave kernel composed with the smoothed Green's function
};

struct ProbeResult {
    double t = 0.0;
    std::array<double, 2> x{0.0, 0.0};
    std::vector<double> lhs;    // per N
    std::vector<double> env;    // per N
    std::vector<double> ratio;  // per N
    bool flagged = false;       // quadrature convergence doubt
};

struct BoundCheckReport {
    std::string lemma;
    std::vector<double> N_values;
    std::vector<ProbeResult> probes;
    std::vector<double> level_max_ratio; // grid-wide sup of lhs/env per level
    double max_ratio = 0.0;
    double worst_uniformity = 0.0; // level constant vs the first level
    bool pass = false;
};

struct KernelLemmaParams {
    double theta = 1.0;  // point_singularity
    double gamma = 0.5;  // cone_singularity
    double t = 0.7;      // time for the cone / wave lemmas
    int deriv_order = 1; // 1 or 2 for the derivative lemmas
};

BoundCheckReport smoothed_singularity_check(KernelLemma lemma, const std::vector<double>& N_values,
                                            const KernelLemmaParams& params = {});

// Monte Carlo estimate of the paired cone-kernel integrals against elliptic
// (plus) or elliptic-times-hyperbolic (minus) singular factors, with the
// fitted large-time exponent.
struct SingularIntegralReport {
    bool minus_kind = false;
    double b = 0.0, s1 = 0.0, s2 = 0.0;
    std::vector<double> t_values;
    std::vector<double> values;
    std::vector<double> rel_se;
    double fitted_exponent = 0.0;
    bool converged = true; // all points reached the requested relative error
};

SingularIntegralReport singular_integral_I(bool minus_kind, double b, double s1, double s2,
                                           const std::vector<double>& t_values, long samples,
                                           std::uint64_t seed, int threads = 0);

} // namespace hsg
