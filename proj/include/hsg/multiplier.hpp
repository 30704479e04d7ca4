#pragma once

#include "hsg/lattice.hpp"

#include <functional>

namespace hsg {

// Static (spatial) Fourier multipliers on the truncated lattice.
struct MultiplierSpec {
    enum class Kind {
        bessel,           // <n>^s
        abs_grad,         // |n|^s, zero mode sent to 0
        kg_symbol,        // (3/4 + |n|^2)^(s/2)
        cutoff_chi,       // chi(|n|/N), params = {N}
        littlewood_paley, // annulus(|n|/K), params = {K}
        custom            // user symbol
    };

    Kind kind = Kind::bessel;
    double s = 0.0;                                 // power for the first three kinds
    double param = 0.0;                             // N or K
    std::function<double(int, int)> custom_symbol;  // for Kind::custom

    static MultiplierSpec bessel(double s) { return {Kind::bessel, s, 0.0, {}}; }
    static MultiplierSpec abs_grad(double s) { return {Kind::abs_grad, s, 0.0, {}}; }
    static MultiplierSpec kg(double s) { return {Kind::kg_symbol, s, 0.0, {}}; }
    static MultiplierSpec cutoff(double N) { return {Kind::cutoff_chi, 0.0, N, {}}; }
    static MultiplierSpec dyadic_block(double K) { return {Kind::littlewood_paley, 0.0, K, {}}; }
    static MultiplierSpec custom(std::function<double(int, int)> f) {
        return {Kind::custom, 0.0, 0.0, std::move(f)};
    }

    double symbol(int n1, int n2) const;
};

// coeff'(n) = m(n) * coeff(n).  Real symbols preserve the Hermitian flag.
// Throws if the symbol is non-finite anywhere on the lattice.
SpectralField apply_multiplier(const SpectralField& u, const MultiplierSpec& m);

// Smooth frequency projection at level N: symbol chi(|n|/N).
SpectralField project_cutoff(const SpectralField& u, double N);

enum class PropagatorKind { sin_over_norm_wave, sin_over_norm_kg, cos_wave, cos_kg };

// Mode-wise propagator factors exp(-t/2 [damping]) * sin(t w)/w or cos(t w),
// with w = |n| (wave) or (3/4+|n|^2)^(1/2) (massive).  The n = 0 wave symbol
// of the sine kind is its continuity value t.
SpectralField wave_propagator_apply(const SpectralField& u, double t, PropagatorKind kind,
                                    bool damping);

} // namespace hsg
