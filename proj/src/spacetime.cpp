#include "hsg/spacetime.hpp"

#include "hsg/fft.hpp"

#include <cmath>

namespace hsg {

namespace {

// Applies the 1D DFT along the slice axis for every spatial index.
void temporal_dft(SpaceTimeField& u, int sign) {
    const std::size_t S = u.spatial_size();
    const int n = u.tgrid.n;
    std::vector<cplx> series(n);
    for (std::size_t s = 0; s < S; ++s) {
        for (int j = 0; j < n; ++j) series[j] = u.data[static_cast<std::size_t>(j) * S + s];
        fft::dft1d(series.data(), n, sign);
        for (int j = 0; j < n; ++j) u.data[static_cast<std::size_t>(j) * S + s] = series[j];
    }
}

} // namespace

void to_tau_domain(SpaceTimeField& u) {
    if (u.domain == SpaceTimeField::Domain::tau) return;
    const int n = u.tgrid.n;
    const std::size_t S = u.spatial_size();
    temporal_dft(u, -1);
    const double scale = u.tgrid.dt / std::sqrt(two_pi);
    for (int k = 0; k < n; ++k) {
        // Phase accounts for the grid origin t0.
        const cplx ph = scale * std::exp(cplx(0.0, -u.tgrid.tau(k) * u.tgrid.t0));
        for (std::size_t s = 0; s < S; ++s) u.data[static_cast<std::size_t>(k) * S + s] *= ph;
    }
    u.domain = SpaceTimeField::Domain::tau;
}

void to_time_domain(SpaceTimeField& u) {
    if (u.domain == SpaceTimeField::Domain::time) return;
    const int n = u.tgrid.n;
    const std::size_t S = u.spatial_size();
    const double scale = u.tgrid.dtau() / std::sqrt(two_pi);
    for (int k = 0; k < n; ++k) {
        const cplx ph = scale * std::exp(cplx(0.0, u.tgrid.tau(k) * u.tgrid.t0));
        for (std::size_t s = 0; s < S; ++s) u.data[static_cast<std::size_t>(k) * S + s] *= ph;
    }
    temporal_dft(u, +1);
    u.domain = SpaceTimeField::Domain::time;
}

void restrict_time(SpaceTimeField& u, double a, double b) {
    if (u.domain != SpaceTimeField::Domain::time)
        throw std::invalid_argument("restrict_time: field must be in the time domain");
    const std::size_t S = u.spatial_size();
    for (int j = 0; j < u.tgrid.n; ++j) {
        const double t = u.tgrid.time(j);
        if (t >= a && t <= b) continue;
        for (std::size_t s = 0; s < S; ++s) u.data[static_cast<std::size_t>(j) * S + s] = 0.0;
    }
}

double l2_spacetime(const SpaceTimeField& u) {
    double acc = 0.0;
    for (const auto& c : u.data) acc += std::norm(c);
    const double meas = u.domain == SpaceTimeField::Domain::time ? u.tgrid.dt : u.tgrid.dtau();
    return std::sqrt(acc * meas);
}

} // namespace hsg
