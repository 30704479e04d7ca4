#include "hsg/lattice.hpp"

#include "hsg/fft.hpp"

#include <algorithm>

namespace hsg {

double SpectralField::hermitian_defect() const {
    const int G = lattice.grid_size();
    const int M = lattice.M;
    double worst = 0.0;
    for (int n1 = -M + 1; n1 < M; ++n1)
        for (int n2 = -M + 1; n2 < M; ++n2) {
            const cplx a = at(n1, n2);
            const cplx b = at(-n1, -n2);
            worst = std::max(worst, std::abs(a - std::conj(b)));
        }
    // Edge rows n_i = -M have no +M partner; a real field must not use them.
    for (int k = 0; k < G; ++k) {
        worst = std::max(worst, std::abs(coeffs[static_cast<std::size_t>(lattice.index_of_mode(-M)) * G + k]));
        worst = std::max(worst, std::abs(coeffs[static_cast<std::size_t>(k) * G + lattice.index_of_mode(-M)]));
    }
    return worst;
}

SpectralField forward_transform(const RealField2D& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument("forward_transform: non-finite input");
    const int G = f.lattice.grid_size();
    SpectralField out(f.lattice, true);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.coeffs[i] = f.values[i];
    fft::dft2d(out.coeffs.data(), G, -1);
    const double scale = two_pi / (static_cast<double>(G) * G);
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

SpectralField forward_transform_complex(const FrequencyLattice& lat, const std::vector<cplx>& grid) {
    if (grid.size() != lat.num_modes())
        throw std::invalid_argument("forward_transform_complex: size mismatch");
    const int G = lat.grid_size();
    SpectralField out(lat, false);
    out.coeffs = grid;
    fft::dft2d(out.coeffs.data(), G, -1);
    const double scale = two_pi / (static_cast<double>(G) * G);
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

std::vector<cplx> inverse_transform_complex(const SpectralField& u) {
    const int G = u.lattice.grid_size();
    std::vector<cplx> grid = u.coeffs;
    fft::dft2d(grid.data(), G, +1);
    const double scale = 1.0 / two_pi;
    for (auto& c : grid) c *= scale;
    return grid;
}

RealField2D inverse_transform(const SpectralField& u) {
    auto grid = inverse_transform_complex(u);
    RealField2D out(u.lattice);
    double max_im = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.values[i] = grid[i].real();
        max_im = std::max(max_im, std::fabs(grid[i].imag()));
        max_abs = std::max(max_abs, std::abs(grid[i]));
    }
    if (u.real_symmetric && max_im > 1e-10 * std::max(1.0, max_abs))
        throw std::runtime_error("inverse_transform: field flagged real has imaginary residual");
    return out;
}

} // namespace hsg
