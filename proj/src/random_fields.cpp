#include "hsg/random_fields.hpp"

#include "hsg/bump.hpp"
#include "hsg/multiplier.hpp"

#include <cmath>

namespace hsg {

namespace {

// Canonical representative of the +/-n pair: the one sampled directly.
bool is_canonical(int n1, int n2) {
    if (n1 > 0) return true;
    if (n1 < 0) return false;
    return n2 >= 0;
}

constexpr std::uint64_t kTagPair = 0x9A3C'55D1'0000'0001ull;
constexpr std::uint64_t kTagNoise = 0x9A3C'55D1'0000'0002ull;

} // namespace

cplx NoisePath::increment(int n1, int n2, int j) const {
    if (j < 0 || j >= steps) throw std::out_of_range("NoisePath: step index");
    if (amplitude == 0.0) return {0.0, 0.0};
    const bool canon = is_canonical(n1, n2);
    const int m1 = canon ? n1 : -n1;
    const int m2 = canon ? n2 : -n2;
    // One counter block per (mode, step); step index occupies the high
    // position bits so draws never overlap.
    RngStream rng(seed ^ kTagNoise, mode_stream(m1, m2), static_cast<std::uint64_t>(j) << 8);
    if (m1 == 0 && m2 == 0) return {amplitude * std::sqrt(dt) * rng.normal(), 0.0};
    const cplx z = amplitude * rng.cnormal(dt);
    return canon ? z : std::conj(z);
}

GaussianPair sample_gaussian_pair(const FrequencyLattice& lat, std::uint64_t seed) {
    GaussianPair out{SpectralField(lat, true), SpectralField(lat, true)};
    const int M = lat.M;
    for (int n1 = -M + 1; n1 < M; ++n1) {
        for (int n2 = -M + 1; n2 < M; ++n2) {
            if (!is_canonical(n1, n2)) continue;
            RngStream rng(seed ^ kTagPair, mode_stream(n1, n2));
            const double w = jbracket(n1, n2);
            if (n1 == 0 && n2 == 0) {
                out.u0.at(0, 0) = rng.normal() / w;
                out.v0.at(0, 0) = rng.normal();
                continue;
            }
            const cplx g = rng.cnormal(1.0);
            const cplx h = rng.cnormal(1.0);
            out.u0.at(n1, n2) = g / w;
            out.u0.at(-n1, -n2) = std::conj(g) / w;
            out.v0.at(n1, n2) = h;
            out.v0.at(-n1, -n2) = std::conj(h);
        }
    }
    return out;
}

double compute_sigma_n(const FrequencyLattice& lat, double N) {
    if (N < 0.25) throw std::invalid_argument("compute_sigma_n: N must be >= 1/4");
    if (lat.M < 2 * static_cast<int>(std::ceil(N)))
        throw std::invalid_argument("compute_sigma_n: lattice too small to resolve the cutoff");
    const int nmax = static_cast<int>(std::ceil(N));
    double sum = 0.0;
    for (int n1 = -nmax; n1 <= nmax; ++n1)
        for (int n2 = -nmax; n2 <= nmax; ++n2) {
            const double r = std::sqrt(static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2);
            const double c = bump::chi_cutoff(r, N);
            if (c == 0.0) continue;
            sum += c * c / (1.0 + r * r);
        }
    return sum / (two_pi * two_pi);
}

RenormConstants compute_renorm_constants(const FrequencyLattice& lat, double N, double beta2) {
    if (beta2 < 0.0) throw std::invalid_argument("compute_renorm_constants: beta2 must be >= 0");
    RenormConstants rc;
    rc.N = N;
    rc.beta2 = beta2;
    rc.sigma_N = compute_sigma_n(lat, N);
    const double expo = 0.5 * beta2 * rc.sigma_N;
    if (expo > 700.0) throw std::overflow_error("compute_renorm_constants: gamma_N saturates");
    rc.gamma_N = std::exp(expo);
    return rc;
}

double gibbs_density_rn(const SpectralField& u, const RenormConstants& rc, double gamma_coupling,
                        double beta) {
    if (beta == 0.0) throw std::invalid_argument("gibbs_density_rn: beta must be non-zero");
    const RealField2D proj = inverse_transform(project_cutoff(u, rc.N));
    double integral = 0.0;
    for (double v : proj.values) integral += std::cos(beta * v);
    const double h = u.lattice.grid_spacing();
    integral *= h * h;
    return rc.gamma_N * gamma_coupling / beta * integral;
}

} // namespace hsg
