#include "hsg/multiplier.hpp"

#include "hsg/bump.hpp"

#include <cmath>

namespace hsg {

double MultiplierSpec::symbol(int n1, int n2) const {
    const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
    switch (kind) {
        case Kind::bessel:
            return std::pow(1.0 + r2, 0.5 * s);
        case Kind::abs_grad:
            if (r2 == 0.0) return 0.0;
            return std::pow(r2, 0.5 * s);
        case Kind::kg_symbol:
            return std::pow(0.75 + r2, 0.5 * s);
        case Kind::cutoff_chi:
            return bump::chi_cutoff(std::sqrt(r2), param);
        case Kind::littlewood_paley:
            return bump::annulus(std::sqrt(r2) / param);
        case Kind::custom:
            return custom_symbol(n1, n2);
    }
    return 0.0;
}

SpectralField apply_multiplier(const SpectralField& u, const MultiplierSpec& m) {
    const int G = u.lattice.grid_size();
    SpectralField out(u.lattice, u.real_symmetric);
    for (int k1 = 0; k1 < G; ++k1) {
        const int n1 = u.lattice.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const int n2 = u.lattice.mode_of_index(k2);
            const double sym = m.symbol(n1, n2);
            if (!std::isfinite(sym))
                throw std::invalid_argument("apply_multiplier: symbol non-finite on lattice");
            out.coeffs[static_cast<std::size_t>(k1) * G + k2] =
                sym * u.coeffs[static_cast<std::size_t>(k1) * G + k2];
        }
    }
    return out;
}

SpectralField project_cutoff(const SpectralField& u, double N) {
    return apply_multiplier(u, MultiplierSpec::cutoff(N));
}

SpectralField wave_propagator_apply(const SpectralField& u, double t, PropagatorKind kind,
                                    bool damping) {
    if (t < 0.0) throw std::invalid_argument("wave_propagator_apply: t must be >= 0");
    const int G = u.lattice.grid_size();
    const double damp = damping ? std::exp(-0.5 * t) : 1.0;
    SpectralField out(u.lattice, u.real_symmetric);
    for (int k1 = 0; k1 < G; ++k1) {
        const int n1 = u.lattice.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const int n2 = u.lattice.mode_of_index(k2);
            const double r = std::sqrt(static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2);
            double sym = 0.0;
            switch (kind) {
                case PropagatorKind::sin_over_norm_wave:
                    sym = (r == 0.0) ? t : std::sin(t * r) / r;
                    break;
                case PropagatorKind::sin_over_norm_kg: {
                    const double w = kg_freq(n1, n2);
                    sym = std::sin(t * w) / w;
                    break;
                }
                case PropagatorKind::cos_wave:
                    sym = std::cos(t * r);
                    break;
                case PropagatorKind::cos_kg:
                    sym = std::cos(t * kg_freq(n1, n2));
                    break;
            }
            out.coeffs[static_cast<std::size_t>(k1) * G + k2] =
                damp * sym * u.coeffs[static_cast<std::size_t>(k1) * G + k2];
        }
    }
    return out;
}

} // namespace hsg
