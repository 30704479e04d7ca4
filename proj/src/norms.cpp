#include "hsg/norms.hpp"

#include "hsg/bump.hpp"
#include "hsg/fft.hpp"
#include "hsg/multiplier.hpp"
#include "hsg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsg {

namespace {

double mode_abs(const FrequencyLattice& lat, int k1, int k2) {
    const double n1 = lat.mode_of_index(k1);
    const double n2 = lat.mode_of_index(k2);
    return std::sqrt(n1 * n1 + n2 * n2);
}

// L^p_{t,x} norm of the physical-space values of a time-domain field.
double lp_physical(const SpaceTimeField& u, double p) {
    const int G = u.lattice.grid_size();
    const std::size_t S = u.spatial_size();
    const double hx = u.lattice.grid_spacing();
    std::vector<cplx> slice(S);
    double acc = 0.0, sup = 0.0;
    for (int j = 0; j < u.tgrid.n; ++j) {
        std::copy(u.data.begin() + static_cast<std::ptrdiff_t>(j) * S,
                  u.data.begin() + static_cast<std::ptrdiff_t>(j + 1) * S, slice.begin());
        fft::dft2d(slice.data(), G, +1);
        for (auto& c : slice) c /= two_pi;
        if (std::isinf(p)) {
            for (const auto& c : slice) sup = std::max(sup, std::abs(c));
        } else {
            double s = 0.0;
            for (const auto& c : slice) s += std::pow(std::abs(c), p);
            acc += s * hx * hx;
        }
    }
    if (std::isinf(p)) return sup;
    return std::pow(acc * u.tgrid.dt, 1.0 / p);
}

} // namespace

cplx box_symbol(double tau, double rho, double b, double mod_floor) {
    double mod = std::fabs(std::fabs(tau) - rho);
    double sum = std::fabs(tau) + rho;
    if (b < 0.0) {
        mod = std::max(mod, mod_floor);
        sum = std::max(sum, mod_floor);
    }
    const double mag = std::pow(mod * sum, b);
    if (std::fabs(tau) >= rho) {
        // e^{-b pi i sgn(tau)}
        const double ang = -b * M_PI * (tau >= 0.0 ? 1.0 : -1.0);
        return mag * cplx(std::cos(ang), std::sin(ang));
    }
    return cplx(mag, 0.0);
}

double spacetime_norm(const SpaceTimeField& u, SpaceTimeNormKind kind, const NormParams& prm) {
    const int G = u.lattice.grid_size();
    const std::size_t S = u.spatial_size();
    const int nt = u.tgrid.n;

    if (kind == SpaceTimeNormKind::X) {
        SpaceTimeField v = u;
        to_tau_domain(v);
        double acc = 0.0;
        for (int k = 0; k < nt; ++k) {
            const double tau = v.tgrid.tau(k);
            for (int k1 = 0; k1 < G; ++k1)
                for (int k2 = 0; k2 < G; ++k2) {
                    const double rho = mode_abs(v.lattice, k1, k2);
                    const double jb = std::sqrt(1.0 + rho * rho);
                    const double mod = std::fabs(std::fabs(tau) - rho);
                    const double wgt = std::pow(jb, prm.s) * std::pow(std::sqrt(1.0 + mod * mod), prm.b);
                    acc += wgt * wgt *
                           std::norm(v.data[static_cast<std::size_t>(k) * S +
                                            static_cast<std::size_t>(k1) * G + k2]);
                }
        }
        return std::sqrt(acc * v.tgrid.dtau());
    }

    if (kind == SpaceTimeNormKind::Y) {
        SpaceTimeField v = u;
        to_tau_domain(v);
        const double mod_floor = 0.5 * v.tgrid.dtau();
        double total_mass = 0.0, floored_mass = 0.0;
        for (int k = 0; k < nt; ++k) {
            const double tau = v.tgrid.tau(k);
            for (int k1 = 0; k1 < G; ++k1)
                for (int k2 = 0; k2 < G; ++k2) {
                    const double rho = mode_abs(v.lattice, k1, k2);
                    const double jb = std::sqrt(1.0 + rho * rho);
                    double mod = std::fabs(std::fabs(tau) - rho);
                    auto& c = v.data[static_cast<std::size_t>(k) * S +
                                     static_cast<std::size_t>(k1) * G + k2];
                    const double m = std::norm(c);
                    total_mass += m;
                    if (prm.b < 0.0 && mod < mod_floor) {
                        floored_mass += m;
                        mod = mod_floor;
                    }
                    c *= std::pow(jb, prm.s) * std::pow(mod, prm.b);
                }
        }
        if (prm.b < 0.0 && total_mass > 0.0 && floored_mass > 1e-3 * total_mass)
            throw std::runtime_error("modulation underresolved");
        to_time_domain(v);
        double acc = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double t = v.tgrid.time(j);
            const double wt = std::pow(1.0 + t * t, prm.a);
            double s = 0.0;
            for (std::size_t idx = 0; idx < S; ++idx)
                s += std::norm(v.data[static_cast<std::size_t>(j) * S + idx]);
            acc += wt * s;
        }
        return std::sqrt(acc * v.tgrid.dt);
    }

    // Lambda: <grad>^s <d_t>^b in the transform domain, then L^p physical.
    SpaceTimeField v = u;
    to_tau_domain(v);
    for (int k = 0; k < nt; ++k) {
        const double tau = v.tgrid.tau(k);
        const double wt = std::pow(1.0 + tau * tau, 0.5 * prm.b);
        for (int k1 = 0; k1 < G; ++k1)
            for (int k2 = 0; k2 < G; ++k2) {
                const double rho = mode_abs(v.lattice, k1, k2);
                v.data[static_cast<std::size_t>(k) * S + static_cast<std::size_t>(k1) * G + k2] *=
                    wt * std::pow(1.0 + rho * rho, 0.5 * prm.s);
            }
    }
    to_time_domain(v);
    return lp_physical(v, prm.p);
}

SpaceTimeField apply_box_power(const SpaceTimeField& u, double b) {
    SpaceTimeField v = u;
    to_tau_domain(v);
    const int G = v.lattice.grid_size();
    const std::size_t S = v.spatial_size();
    const double mod_floor = 0.5 * v.tgrid.dtau();
    for (int k = 0; k < v.tgrid.n; ++k) {
        const double tau = v.tgrid.tau(k);
        for (int k1 = 0; k1 < G; ++k1)
            for (int k2 = 0; k2 < G; ++k2) {
                const double rho = mode_abs(v.lattice, k1, k2);
                v.data[static_cast<std::size_t>(k) * S + static_cast<std::size_t>(k1) * G + k2] *=
                    box_symbol(tau, rho, b, mod_floor);
            }
    }
    return v;
}

SpaceTimeField apply_cone_block(const SpaceTimeField& u, const ConeBlockSpec& spec,
                                ConePrefix prefix) {
    SpaceTimeField v = u;
    to_tau_domain(v);
    const int G = v.lattice.grid_size();
    const std::size_t S = v.spatial_size();
    const double mod_floor = 0.5 * v.tgrid.dtau();
    for (int k = 0; k < v.tgrid.n; ++k) {
        const double tau = v.tgrid.tau(k);
        for (int k1 = 0; k1 < G; ++k1)
            for (int k2 = 0; k2 < G; ++k2) {
                const double rho = mode_abs(v.lattice, k1, k2);
                const double modu = std::fabs(tau) - rho;
                double sym = bump::annulus(rho / spec.N) * bump::annulus(tau / spec.R) *
                             bump::annulus(modu / spec.L);
                if (spec.b != 0.0) {
                    const double m =
                        spec.b < 0.0 ? std::max(std::fabs(modu), mod_floor) : std::fabs(modu);
                    sym *= std::pow(m, spec.b);
                }
                cplx factor(sym, 0.0);
                if (prefix != ConePrefix::Id) {
                    if (std::fabs(tau) <= rho) factor = 0.0;
                    if (prefix == ConePrefix::HC) factor *= cplx(0.0, tau >= 0.0 ? -1.0 : 1.0);
                }
                v.data[static_cast<std::size_t>(k) * S + static_cast<std::size_t>(k1) * G + k2] *=
                    factor;
            }
    }
    return v;
}

SpectralField dyadic_block(const SpectralField& u, double K, double K_min) {
    const int G = u.lattice.grid_size();
    SpectralField out(u.lattice, u.real_symmetric);
    for (int k1 = 0; k1 < G; ++k1)
        for (int k2 = 0; k2 < G; ++k2) {
            const double rho = mode_abs(u.lattice, k1, k2);
            const double sym =
                K <= K_min ? bump::fat_bump(rho / K) : bump::annulus(rho / K);
            out.coeffs[static_cast<std::size_t>(k1) * G + k2] =
                sym * u.coeffs[static_cast<std::size_t>(k1) * G + k2];
        }
    return out;
}

RealField2D paraproduct(const SpectralField& u, const SpectralField& v, double gamma, bool high) {
    if (u.lattice != v.lattice) throw std::invalid_argument("paraproduct: lattice mismatch");
    const double K_min = 1.0;
    const int levels = 1 + static_cast<int>(std::ceil(std::log2(u.lattice.M * 1.5)));
    std::vector<RealField2D> ublocks, vblocks;
    std::vector<double> Ks;
    for (int l = 0; l < levels; ++l) {
        const double K = K_min * std::ldexp(1.0, l);
        Ks.push_back(K);
        ublocks.push_back(inverse_transform(dyadic_block(u, K, K_min)));
        vblocks.push_back(inverse_transform(dyadic_block(v, K, K_min)));
    }
    RealField2D out(u.lattice);
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            const bool sel = Ks[i] >= std::pow(Ks[j], gamma);
            if (sel != high) continue;
            for (std::size_t s = 0; s < out.values.size(); ++s)
                out.values[s] += ublocks[i].values[s] * vblocks[j].values[s];
        }
    return out;
}

WeightedConeReport weighted_cone_probe(double a, double b, const std::vector<double>& L_values,
                                       int num_fields, std::uint64_t seed) {
    if (a <= 0.0 || a >= 1.0) throw std::invalid_argument("weighted_cone_probe: a in (0,1)");
    const double delta0 = 0.1;
    // 1D reduction: the block multiplier acts per spatial mode in tau only,
    // and the bound is proved mode-by-mode, so probe single modes.
    const int nt = 1 << 14;
    const double Tw = 640.0;
    const TimeGrid tg = TimeGrid::window(Tw, nt);
    const double dtau = tg.dtau();

    const std::vector<double> rhos = {1.0, std::sqrt(5.0), 4.0, 9.0};

    WeightedConeReport rep;
    rep.L_values = L_values;
    rep.max_ratio.assign(L_values.size(), 0.0);
    rep.raw_gain.assign(L_values.size(), 0.0);

    std::vector<cplx> base(nt), work(nt);
    for (int f = 0; f < num_fields; ++f) {
        RngStream rng(seed, 0x77AA0000u + static_cast<std::uint64_t>(f));
        // Band-limited noise under a compact window: u(t) = w(t) * g(t).
        std::fill(base.begin(), base.end(), cplx{0.0, 0.0});
        const double tau_band = 14.0;
        for (int k = 0; k < nt; ++k) {
            if (std::fabs(tg.tau(k)) > tau_band) continue;
            base[k] = rng.cnormal(1.0);
        }
        fft::dft1d(base.data(), nt, +1);
        for (int j = 0; j < nt; ++j) {
            const double t = tg.time(j);
            base[j] *= bump::step_down(std::fabs(t) / 3.0);
        }

        // Weighted and plain reference norms.
        double wnorm2 = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double t = tg.time(j);
            wnorm2 += std::pow(1.0 + t * t, a) * std::norm(base[j]);
        }
        const double wnorm = std::sqrt(wnorm2 * tg.dt);

        std::vector<cplx> hat = base;
        fft::dft1d(hat.data(), nt, -1);
        const double hat_scale = tg.dt / std::sqrt(two_pi);
        for (auto& c : hat) c *= hat_scale;

        for (std::size_t li = 0; li < L_values.size(); ++li) {
            const double L = L_values[li];
            for (double rho : rhos) {
                const double Rblock = std::max(1.0, std::exp2(std::round(std::log2(std::max(rho, 1.0)))));
                // Low-modulation reference mass ||tau|-rho| <= 2 L^{1-delta0}.
                double lowmass = 0.0;
                for (int k = 0; k < nt; ++k) {
                    const double mod = std::fabs(std::fabs(tg.tau(k)) - rho);
                    if (mod <= 2.0 * std::pow(L, 1.0 - delta0)) lowmass += std::norm(hat[k]);
                }
                const double low_l2 = std::sqrt(lowmass * dtau);

                for (int prefix = 0; prefix < 3; ++prefix) {
                    for (int k = 0; k < nt; ++k) {
                        const double tau = tg.tau(k);
                        const double modu = std::fabs(tau) - rho;
                        double sym = bump::annulus(tau / Rblock) * bump::annulus(modu / L);
                        if (b != 0.0) {
                            const double m = b < 0.0 ? std::max(std::fabs(modu), 0.5 * dtau)
                                                     : std::fabs(modu);
                            sym *= std::pow(m, b);
                        }
                        cplx fac(sym, 0.0);
                        if (prefix > 0) {
                            if (std::fabs(tau) <= rho) fac = 0.0;
                            if (prefix == 2) fac *= cplx(0.0, tau >= 0.0 ? -1.0 : 1.0);
                        }
                        work[k] = hat[k] * fac;
                    }
                    // Back to time with the inverse scaling.
                    std::vector<cplx> tmp = work;
                    fft::dft1d(tmp.data(), nt, +1);
                    const double inv_scale = dtau / std::sqrt(two_pi);
                    double lhs2 = 0.0;
                    for (int j = 0; j < nt; ++j) {
                        const double t = tg.time(j);
                        lhs2 += std::pow(1.0 + t * t, a) * std::norm(tmp[j] * inv_scale);
                    }
                    const double lhs = std::sqrt(lhs2 * tg.dt);
                    const double Lb = std::pow(L, b);
                    const double env =
                        Lb * (1.0 + std::pow(L, -(1.0 - delta0) * (a + delta0 / 10.0))) * wnorm +
                        Lb * (1.0 + std::pow(L, -a * (1.0 - delta0) - delta0)) * low_l2;
                    if (env > 0.0) rep.max_ratio[li] = std::max(rep.max_ratio[li], lhs / env);
                    if (wnorm > 0.0)
                        rep.raw_gain[li] = std::max(rep.raw_gain[li], lhs / (Lb * wnorm));
                }
            }
        }
    }

    // Fit slope of log(max ratio) vs log L.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < L_values.size(); ++i) {
        if (rep.max_ratio[i] <= 0.0) continue;
        const double x = std::log(L_values[i]);
        const double y = std::log(rep.max_ratio[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) rep.fitted_ratio_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    rep.max_overall = *std::max_element(rep.max_ratio.begin(), rep.max_ratio.end());
    return rep;
}

LeibnizReport hyperbolic_leibniz_check(std::size_t num_samples, std::uint64_t seed) {
    LeibnizReport rep;
    rep.samples = num_samples;
    RngStream rng(seed, 0xC0DEull);
    auto draw_xi = [&](double scale) {
        const double ang = two_pi * rng.next_uniform();
        return std::array<double, 2>{scale * std::cos(ang), scale * std::sin(ang)};
    };
    for (std::size_t i = 0; i < num_samples; ++i) {
        const double s1 = std::pow(10.0, -2.0 + 5.0 * rng.next_uniform());
        const double s2 = std::pow(10.0, -2.0 + 5.0 * rng.next_uniform());
        const auto xi1 = draw_xi(s1);
        const auto xi2 = draw_xi(s2);
        const double r1 = std::hypot(xi1[0], xi1[1]);
        const double r2 = std::hypot(xi2[0], xi2[1]);
        // Mix of near-null and generic temporal frequencies.
        const int mode = static_cast<int>(rng.next_uniform() * 3.0);
        double tau1, tau2;
        if (mode == 0) {
            tau1 = (rng.next_uniform() < 0.5 ? 1.0 : -1.0) * r1;
            tau2 = (rng.next_uniform() < 0.5 ? 1.0 : -1.0) * r2;
        } else if (mode == 1) {
            tau1 = (rng.next_uniform() < 0.5 ? 1.0 : -1.0) * r1 * (1.0 + 0.3 * (rng.next_uniform() - 0.5));
            tau2 = (rng.next_uniform() < 0.5 ? 1.0 : -1.0) * r2 * (1.0 + 0.3 * (rng.next_uniform() - 0.5));
        } else {
            tau1 = 2.0 * s1 * (rng.next_uniform() - 0.5) * 3.0;
            tau2 = 2.0 * s2 * (rng.next_uniform() - 0.5) * 3.0;
        }
        const double tau = tau1 + tau2;
        const double rsum = std::hypot(xi1[0] + xi2[0], xi1[1] + xi2[1]);
        const double lhs = std::fabs(std::fabs(tau) - rsum);
        const double denom =
            std::fabs(std::fabs(tau1) - r1) + std::fabs(std::fabs(tau2) - r2) + std::min(r1, r2);
        if (denom < 1e-14) continue;
        const double c = lhs / denom;
        rep.max_c = std::max(rep.max_c, c);
        if (mode == 0) rep.max_c_null = std::max(rep.max_c_null, c);
    }
    return rep;
}

} // namespace hsg
