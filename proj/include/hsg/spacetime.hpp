#pragma once

#include "hsg/lattice.hpp"

namespace hsg {

// Uniform time grid t_j = t0 + j dt, j in [0, n).  The dual grid carries
// frequencies tau_k = (2 pi / (n dt)) * k in FFT (wrap-around) order.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int n = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, int n_) : t0(t0_), dt(dt_), n(n_) {
        if (dt <= 0.0 || n < 2) throw std::invalid_argument("TimeGrid: invalid grid");
    }
    static TimeGrid window(double half_width, int n) {
        return TimeGrid(-half_width, 2.0 * half_width / n, n);
    }

    double time(int j) const { return t0 + j * dt; }
    double dtau() const { return two_pi / (n * dt); }
    int signed_index(int k) const { return k < n / 2 ? k : k - n; }
    double tau(int k) const { return dtau() * signed_index(k); }
    double t_max() const { return t0 + (n - 1) * dt; }
};

// Space-time field: spatial spectral coefficients per time slice (domain ==
// time) or per dual frequency (domain == tau).  The temporal transform is
//   u_hat(tau, n) = (2 pi)^{-1/2} integral e^{-i tau t} u_hat_x(t, n) dt,
// discretized by the trapezoid rule on the grid.
struct SpaceTimeField {
    enum class Domain { time, tau };

    FrequencyLattice lattice;
    TimeGrid tgrid;
    Domain domain = Domain::time;
    bool real_field = false;
    std::vector<cplx> data; // [slice * S + spatial_index], S = grid_size^2

    SpaceTimeField() = default;
    SpaceTimeField(const FrequencyLattice& lat, const TimeGrid& tg, bool real = false)
        : lattice(lat), tgrid(tg), real_field(real),
          data(static_cast<std::size_t>(tg.n) * lat.num_modes(), cplx{0.0, 0.0}) {}

    std::size_t spatial_size() const { return lattice.num_modes(); }
    cplx& at(int slice, int k1, int k2) {
        return data[static_cast<std::size_t>(slice) * spatial_size() +
                    static_cast<std::size_t>(k1) * lattice.grid_size() + k2];
    }
    // Mode accessor by signed mode numbers.
    cplx& mode(int slice, int n1, int n2) {
        return data[static_cast<std::size_t>(slice) * spatial_size() +
                    static_cast<std::size_t>(lattice.index_of_mode(n1)) * lattice.grid_size() +
                    lattice.index_of_mode(n2)];
    }
    cplx mode(int slice, int n1, int n2) const {
        return data[static_cast<std::size_t>(slice) * spatial_size() +
                    static_cast<std::size_t>(lattice.index_of_mode(n1)) * lattice.grid_size() +
                    lattice.index_of_mode(n2)];
    }
};

// In-place temporal transforms between the two domains.
void to_tau_domain(SpaceTimeField& u);
void to_time_domain(SpaceTimeField& u);

// Zeroes all slices with t outside [a, b] (sharp time restriction).
void restrict_time(SpaceTimeField& u, double a, double b);

// L^2(dt dx) norm (Plancherel in space; trapezoid in the slice variable).
double l2_spacetime(const SpaceTimeField& u);

} // namespace hsg
