#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hsg {

using cplx = std::complex<double>;

constexpr double two_pi = 6.283185307179586476925286766559;

// Japanese-bracket weight <n> = (1 + |n|^2)^(1/2).
inline double jbracket(double n1, double n2) {
    return std::sqrt(1.0 + n1 * n1 + n2 * n2);
}

// Massive wave frequency (3/4 + |n|^2)^(1/2); the oscillation rate of the
// damped Klein-Gordon mode n.
inline double kg_freq(double n1, double n2) {
    return std::sqrt(0.75 + n1 * n1 + n2 * n2);
}

// Truncated frequency lattice on the 2-torus of side 2*pi.  Modes live in
// {-M,...,M-1}^2 and the collocation grid has 2M points per dimension.
// N_cutoff is the smoothing-parameter level resolved by this lattice; the
// cutoff symbol vanishes for |n| > N_cutoff, so M >= 2*ceil(N_cutoff)
// leaves headroom for products before projection.
struct FrequencyLattice {
    int M = 0;
    double N_cutoff = 0.0;

    FrequencyLattice() = default;
    FrequencyLattice(int M_, double N_cutoff_) : M(M_), N_cutoff(N_cutoff_) {
        if (M < 1) throw std::invalid_argument("lattice: M must be positive");
        if (N_cutoff <= 0.0) throw std::invalid_argument("lattice: N_cutoff must be positive");
        if (M < 2 * static_cast<int>(std::ceil(N_cutoff)))
            throw std::invalid_argument("lattice: M too small to resolve the cutoff (need M >= 2*ceil(N))");
    }

    // Standard lattice for cutoff level N: M = 2*ceil(N).
    static FrequencyLattice for_cutoff(double N) {
        return FrequencyLattice(2 * static_cast<int>(std::ceil(N)), N);
    }

    int grid_size() const { return 2 * M; }
    std::size_t num_modes() const {
        auto g = static_cast<std::size_t>(grid_size());
        return g * g;
    }
    double grid_spacing() const { return two_pi / grid_size(); }

    // FFT-order index k in [0, 2M) <-> signed mode n in [-M, M).
    int mode_of_index(int k) const { return k < M ? k : k - 2 * M; }
    int index_of_mode(int n) const { return n >= 0 ? n : n + 2 * M; }

    bool operator==(const FrequencyLattice& o) const {
        return M == o.M && N_cutoff == o.N_cutoff;
    }
    bool operator!=(const FrequencyLattice& o) const { return !(*this == o); }
};

// Complex Fourier coefficients indexed over the truncated lattice, FFT
// (row-major, wrap-around) order.  `real_symmetric` flags fields that are
// real in physical space, i.e. coeff(-n) = conj(coeff(n)).
struct SpectralField {
    FrequencyLattice lattice;
    std::vector<cplx> coeffs;
    bool real_symmetric = false;

    SpectralField() = default;
    explicit SpectralField(const FrequencyLattice& lat, bool real_sym = false)
        : lattice(lat), coeffs(lat.num_modes(), cplx{0.0, 0.0}), real_symmetric(real_sym) {}

    cplx& at(int n1, int n2) {
        return coeffs[static_cast<std::size_t>(lattice.index_of_mode(n1)) * lattice.grid_size() +
                      lattice.index_of_mode(n2)];
    }
    cplx at(int n1, int n2) const {
        return coeffs[static_cast<std::size_t>(lattice.index_of_mode(n1)) * lattice.grid_size() +
                      lattice.index_of_mode(n2)];
    }

    // Max |coeff(-n) - conj(coeff(n))| over pairable modes.
    double hermitian_defect() const;

    // l^2 norm of the coefficients; equals the L^2(T^2) norm of the field.
    double l2_norm() const {
        double s = 0.0;
        for (const auto& c : coeffs) s += std::norm(c);
        return std::sqrt(s);
    }
};

// Real samples on the uniform collocation grid of the torus.
struct RealField2D {
    FrequencyLattice lattice;
    std::vector<double> values;

    RealField2D() = default;
    explicit RealField2D(const FrequencyLattice& lat)
        : lattice(lat), values(lat.num_modes(), 0.0) {}

    double& at(int j1, int j2) {
        return values[static_cast<std::size_t>(j1) * lattice.grid_size() + j2];
    }
    double at(int j1, int j2) const {
        return values[static_cast<std::size_t>(j1) * lattice.grid_size() + j2];
    }
    double grid_x(int j) const { return j * lattice.grid_spacing(); }
};

// Trapezoid (= equal-weight) quadrature of a grid function over the torus.
inline double torus_quadrature(const RealField2D& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    const double h = f.lattice.grid_spacing();
    return s * h * h;
}

// Forward transform: coefficients of f against the orthonormal characters
// (2*pi)^{-1} exp(i n.x), computed by the trapezoid rule (exact for
// band-limited data).  Throws on non-finite input.
SpectralField forward_transform(const RealField2D& f);

// Complex-input variant (no Hermitian flag set).
SpectralField forward_transform_complex(const FrequencyLattice& lat, const std::vector<cplx>& grid);

// Inverse transform onto the collocation grid.  Throws if the imaginary
// residual exceeds 1e-10 relative when the field claims to be real.
RealField2D inverse_transform(const SpectralField& u);

// Inverse transform keeping complex values.
std::vector<cplx> inverse_transform_complex(const SpectralField& u);

} // namespace hsg
