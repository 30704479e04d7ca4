#include "hsg/dynamics.hpp"

#include "hsg/bump.hpp"
#include "hsg/fft.hpp"
#include "hsg/multiplier.hpp"
#include "hsg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace hsg {

namespace {

constexpr std::uint64_t kTagFlow = 0x0F10'77AB'0000'0004ull;

} // namespace

double FlowIntegrator::dt_max(double N) { return std::min(1.0 / (8.0 * N), 5e-3); }

FlowIntegrator::FlowIntegrator(const FrequencyLattice& lat, const FlowConfig& cfg)
    : lat_(lat), cfg_(cfg) {
    if (cfg.dt > dt_max(cfg.rc.N) * (1.0 + 1e-12))
        throw std::invalid_argument("FlowIntegrator: dt exceeds dt_max(N)");
    const int G = lat.grid_size();
    tr_index_.assign(static_cast<std::size_t>(G) * G, -1);
    std::unordered_map<long long, int> index_of;
    for (int k1 = 0; k1 < G; ++k1) {
        const long long n1 = lat.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const long long n2 = lat.mode_of_index(k2);
            const long long r2 = n1 * n1 + n2 * n2;
            auto it = index_of.find(r2);
            if (it == index_of.end()) {
                const double w = cfg.damping
                                     ? kg_freq(static_cast<double>(n1), static_cast<double>(n2))
                                     : jbracket(static_cast<double>(n1), static_cast<double>(n2));
                ModeTransition tr;
                if (cfg.damping) {
                    tr = mode_transition(w, cfg.dt);
                } else {
                    // Undamped drift (diagnostic): plain oscillation at <n>.
                    tr = ModeTransition{};
                    tr.a11 = std::cos(w * cfg.dt);
                    tr.a12 = std::sin(w * cfg.dt) / w;
                    tr.a21 = -w * std::sin(w * cfg.dt);
                    tr.a22 = std::cos(w * cfg.dt);
                }
                transitions_.push_back(tr);
                it = index_of.emplace(r2, static_cast<int>(transitions_.size()) - 1).first;
            }
            tr_index_[static_cast<std::size_t>(k1) * G + k2] = it->second;
        }
    }
}

void FlowIntegrator::kick(FlowState& state, double weight) const {
    if (cfg_.gamma == 0.0) return;
    const double N = cfg_.rc.N;
    // F = -gamma_N gamma P_N sin(beta P_N u), evaluated by collocation.
    SpectralField proj = project_cutoff(state.u, N);
    std::vector<cplx> grid = proj.coeffs;
    const int G = lat_.grid_size();
    fft::dft2d(grid.data(), G, +1);
    for (auto& c : grid) c = std::sin(cfg_.beta * c.real() / two_pi);
    fft::dft2d(grid.data(), G, -1);
    const double scale = two_pi / (static_cast<double>(G) * G);
    const double amp = -cfg_.rc.gamma_N * cfg_.gamma * weight * cfg_.dt;
    for (int k1 = 0; k1 < G; ++k1) {
        const double n1 = lat_.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const double n2 = lat_.mode_of_index(k2);
            const double chi = bump::chi_cutoff(std::hypot(n1, n2), N);
            if (chi == 0.0) continue;
            state.ut.coeffs[static_cast<std::size_t>(k1) * G + k2] +=
                amp * chi * scale * grid[static_cast<std::size_t>(k1) * G + k2];
        }
    }
}

void FlowIntegrator::drift(FlowState& state, int step_index) const {
    const int G = lat_.grid_size();
    const int M = lat_.M;
    for (int n1 = 0; n1 < M; ++n1) {
        for (int n2 = (n1 == 0 ? 0 : -M + 1); n2 < M; ++n2) {
            const int k1 = lat_.index_of_mode(n1);
            const int k2 = lat_.index_of_mode(n2);
            const auto& tr = transitions_[tr_index_[static_cast<std::size_t>(k1) * G + k2]];
            cplx p = state.u.coeffs[static_cast<std::size_t>(k1) * G + k2];
            cplx v = state.ut.coeffs[static_cast<std::size_t>(k1) * G + k2];
            cplx np = tr.a11 * p + tr.a12 * v;
            cplx nv = tr.a21 * p + tr.a22 * v;
            const bool zero_mode = (n1 == 0 && n2 == 0);
            if (cfg_.noise == FlowNoise::path_left_point) {
                const cplx db = cfg_.path.increment(n1, n2, step_index);
                np += tr.b1 * db;
                nv += tr.b2 * db;
            } else if (cfg_.noise == FlowNoise::exact_transition) {
                RngStream rng(cfg_.noise_seed ^ kTagFlow, mode_stream(n1, n2),
                              static_cast<std::uint64_t>(step_index) << 8);
                cplx xi1, xi2;
                if (zero_mode) {
                    xi1 = rng.normal();
                    xi2 = rng.normal();
                } else {
                    xi1 = rng.cnormal(1.0);
                    xi2 = rng.cnormal(1.0);
                }
                np += tr.l11 * xi1;
                nv += tr.l21 * xi1 + tr.l22 * xi2;
            }
            state.u.coeffs[static_cast<std::size_t>(k1) * G + k2] = np;
            state.ut.coeffs[static_cast<std::size_t>(k1) * G + k2] = nv;
            if (!zero_mode) {
                state.u.coeffs[static_cast<std::size_t>(lat_.index_of_mode(-n1)) * G +
                               lat_.index_of_mode(-n2)] = std::conj(np);
                state.ut.coeffs[static_cast<std::size_t>(lat_.index_of_mode(-n1)) * G +
                                lat_.index_of_mode(-n2)] = std::conj(nv);
            }
        }
    }
    state.t += cfg_.dt;
}

void FlowIntegrator::run(FlowState& state, int n_steps, int first_step) const {
    if (n_steps <= 0) return;
    for (const auto& c : state.u.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::runtime_error("FlowIntegrator: non-finite state");
    kick(state, 0.5);
    for (int j = 0; j < n_steps; ++j) {
        drift(state, first_step + j);
        kick(state, j + 1 < n_steps ? 1.0 : 0.5);
    }
}

double flow_energy(const FlowState& state, double gamma, double beta) {
    const int G = state.u.lattice.grid_size();
    double quad = 0.0;
    for (int k1 = 0; k1 < G; ++k1) {
        const double n1 = state.u.lattice.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const double n2 = state.u.lattice.mode_of_index(k2);
            const double jb2 = 1.0 + n1 * n1 + n2 * n2;
            quad += 0.5 * jb2 * std::norm(state.u.coeffs[static_cast<std::size_t>(k1) * G + k2]);
            quad += 0.5 * std::norm(state.ut.coeffs[static_cast<std::size_t>(k1) * G + k2]);
        }
    }
    const double inter = gibbs_density_rn(state.u, state.rc, gamma, beta);
    return quad - inter;
}

WeightedEnsemble sample_gibbs_ensemble(const FrequencyLattice& lat, const RenormConstants& rc,
                                       double gamma, double beta, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_gibbs_ensemble: count >= 1");
    WeightedEnsemble ens;
    ens.states.reserve(count);
    ens.log_weights.reserve(count);
    for (int i = 0; i < count; ++i) {
        auto gp = sample_gaussian_pair(lat, splitmix64(seed + static_cast<std::uint64_t>(i)));
        FlowState st;
        st.u = std::move(gp.u0);
        st.ut = std::move(gp.v0);
        st.rc = rc;
        const double lw = (gamma == 0.0) ? 0.0 : gibbs_density_rn(st.u, rc, gamma, beta);
        ens.states.push_back(std::move(st));
        ens.log_weights.push_back(lw);
    }
    const double lmax = *std::max_element(ens.log_weights.begin(), ens.log_weights.end());
    double sw = 0.0, sw2 = 0.0;
    for (double lw : ens.log_weights) {
        const double w = std::exp(lw - lmax);
        sw += w;
        sw2 += w * w;
    }
    ens.ess = sw * sw / sw2;
    ens.degenerate = ens.ess < 0.05 * count;
    return ens;
}

std::vector<std::string> invariance_observable_names() {
    return {"mode2_00", "mode2_10", "mode2_01", "mode2_11", "mode2_20",
            "cos_int",  "cov_pi0",  "cov_diag", "vel2_10"};
}

std::vector<double> invariance_observables(const FlowState& state, double beta) {
    std::vector<double> obs;
    obs.push_back(std::norm(state.u.at(0, 0)));
    obs.push_back(std::norm(state.u.at(1, 0)));
    obs.push_back(std::norm(state.u.at(0, 1)));
    obs.push_back(std::norm(state.u.at(1, 1)));
    obs.push_back(std::norm(state.u.at(2, 0)));
    const RealField2D proj = inverse_transform(project_cutoff(state.u, state.rc.N));
    double cint = 0.0;
    for (double v : proj.values) cint += std::cos(beta * v);
    const double h = state.u.lattice.grid_spacing();
    obs.push_back(cint * h * h);
    const int G = state.u.lattice.grid_size();
    obs.push_back(proj.at(0, 0) * proj.at(G / 2, 0));
    obs.push_back(proj.at(0, 0) * proj.at(G / 4, G / 4));
    obs.push_back(std::norm(state.ut.at(1, 0)));
    return obs;
}

InvarianceReport invariance_experiment(const WeightedEnsemble& ensemble, double T, double dt,
                                       double gamma, double beta, std::uint64_t noise_seed,
                                       int threads) {
    if (T < 0.0 || T > 4.0) throw std::invalid_argument("invariance_experiment: T in [0, 4]");
    const std::size_t count = ensemble.states.size();
    InvarianceReport rep;
    rep.names = invariance_observable_names();
    rep.ess = ensemble.ess;
    const std::size_t nobs = rep.names.size();

    const int n_steps = static_cast<int>(std::lround(T / dt));
    std::vector<double> before(count * nobs), after(count * nobs);

    parallel_for(count, [&](std::size_t i) {
        const auto& st0 = ensemble.states[i];
        const auto o0 = invariance_observables(st0, beta);
        std::copy(o0.begin(), o0.end(), before.begin() + static_cast<std::ptrdiff_t>(i * nobs));
        FlowState st = st0;
        if (n_steps > 0) {
            FlowConfig cfg;
            cfg.rc = st0.rc;
            cfg.gamma = gamma;
            cfg.beta = beta;
            cfg.dt = dt;
            cfg.damping = true;
            cfg.noise = FlowNoise::exact_transition;
            cfg.noise_seed = splitmix64(noise_seed + 0x9E37ull * i);
            FlowIntegrator integ(st.u.lattice, cfg);
            integ.run(st, n_steps);
        }
        const auto o1 = invariance_observables(st, beta);
        std::copy(o1.begin(), o1.end(), after.begin() + static_cast<std::ptrdiff_t>(i * nobs));
    }, threads);

    // Weighted paired differences.
    const double lmax =
        *std::max_element(ensemble.log_weights.begin(), ensemble.log_weights.end());
    std::vector<double> w(count);
    double sw = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        w[i] = std::exp(ensemble.log_weights[i] - lmax);
        sw += w[i];
    }
    rep.pass = true;
    for (std::size_t k = 0; k < nobs; ++k) {
        double m0 = 0.0, m1 = 0.0, dbar = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            m0 += w[i] * before[i * nobs + k];
            m1 += w[i] * after[i * nobs + k];
        }
        m0 /= sw;
        m1 /= sw;
        dbar = m1 - m0;
        double var = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double d = after[i * nobs + k] - before[i * nobs + k] - dbar;
            var += w[i] * w[i] * d * d;
        }
        const double se = std::sqrt(var) / sw;
        const double z = se > 0.0 ? dbar / se : 0.0;
        rep.mean_before.push_back(m0);
        rep.mean_after.push_back(m1);
        rep.z_scores.push_back(z);
        if (std::fabs(z) > 3.0) rep.pass = false;
    }
    return rep;
}

PicardResult solve_remainder_picard(const std::vector<RealField2D>& psi_diff,
                                    const ChaosSample& theta, double gamma, int iterations) {
    const std::size_t K = theta.times.size();
    if (psi_diff.size() != K || K < 2)
        throw std::invalid_argument("solve_remainder_picard: grid mismatch");
    const FrequencyLattice lat = theta.lattice;
    const int G = lat.grid_size();
    const std::size_t S = lat.num_modes();
    const double dt = theta.times[1] - theta.times[0];
    const double N = theta.rc.N;
    const double beta = theta.beta;

    // Massive-kernel factors for the causal quadrature.
    std::vector<double> u2h(S), u2ph(S), chi_n(S);
    std::vector<int> tr_of(S);
    for (int k1 = 0; k1 < G; ++k1) {
        const double n1 = lat.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const double n2 = lat.mode_of_index(k2);
            const std::size_t idx = static_cast<std::size_t>(k1) * G + k2;
            const double w = kg_freq(n1, n2);
            u2h[idx] = std::exp(-0.5 * dt) * std::sin(w * dt) / w;
            u2ph[idx] = std::exp(-0.5 * dt) * (std::cos(w * dt) - 0.5 * std::sin(w * dt) / w);
            chi_n[idx] = bump::chi_cutoff(std::hypot(n1, n2), N);
            tr_of[idx] = 0;
        }
    }
    std::vector<ModeTransition> trs;
    {
        std::unordered_map<long long, int> index_of;
        for (int k1 = 0; k1 < G; ++k1) {
            const long long n1 = lat.mode_of_index(k1);
            for (int k2 = 0; k2 < G; ++k2) {
                const long long n2 = lat.mode_of_index(k2);
                const long long r2 = n1 * n1 + n2 * n2;
                auto it = index_of.find(r2);
                if (it == index_of.end()) {
                    trs.push_back(mode_transition(kg_freq(static_cast<double>(n1),
                                                          static_cast<double>(n2)), dt));
                    it = index_of.emplace(r2, static_cast<int>(trs.size()) - 1).first;
                }
                tr_of[static_cast<std::size_t>(k1) * G + k2] = it->second;
            }
        }
    }

    PicardResult res;
    res.v.assign(K, SpectralField(lat, true));
    std::vector<std::vector<cplx>> F(K, std::vector<cplx>(S));

    auto compute_forcing = [&](const std::vector<SpectralField>& v) {
        for (std::size_t j = 0; j < K; ++j) {
            // w = e^{i beta P_N v} e^{i beta psi_diff} Theta; F = -gamma P_N Im w
            SpectralField pv = project_cutoff(v[j], N);
            std::vector<cplx> grid = pv.coeffs;
            fft::dft2d(grid.data(), G, +1);
            for (std::size_t s = 0; s < S; ++s) {
                const double phase = beta * (grid[s].real() / two_pi + psi_diff[j].values[s]);
                const cplx w = cplx(std::cos(phase), std::sin(phase)) * theta.grid_values[j][s];
                grid[s] = w.imag();
            }
            fft::dft2d(grid.data(), G, -1);
            const double scale = two_pi / (static_cast<double>(G) * G);
            for (std::size_t s = 0; s < S; ++s) F[j][s] = -gamma * chi_n[s] * scale * grid[s];
        }
    };

    int grow_streak = 0;
    double prev_diff = -1.0;
    for (int it = 0; it < iterations; ++it) {
        compute_forcing(res.v);
        // v_new = causal convolution with the massive damped kernel
        // (trapezoid in the forcing, exact kernel factors).
        std::vector<SpectralField> vnew(K, SpectralField(lat, true));
        std::vector<cplx> pos(S, cplx{0.0, 0.0}), vel(S, cplx{0.0, 0.0});
        for (std::size_t j = 0; j + 1 < K; ++j) {
            for (std::size_t s = 0; s < S; ++s) {
                const auto& tr = trs[tr_of[s]];
                const cplx p = pos[s], vv = vel[s];
                pos[s] = tr.a11 * p + tr.a12 * vv + 0.5 * dt * u2h[s] * F[j][s];
                vel[s] = tr.a21 * p + tr.a22 * vv +
                         0.5 * dt * (u2ph[s] * F[j][s] + F[j + 1][s]);
                vnew[j + 1].coeffs[s] = pos[s];
            }
        }
        double diff = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            double d2 = 0.0;
            for (std::size_t s = 0; s < S; ++s) d2 += std::norm(vnew[j].coeffs[s] - res.v[j].coeffs[s]);
            diff = std::max(diff, std::sqrt(d2));
        }
        res.diff_norms.push_back(diff);
        res.v = std::move(vnew);
        if (prev_diff >= 0.0 && diff > prev_diff) {
            if (++grow_streak >= 3) {
                res.diverged = true;
                break;
            }
        } else {
            grow_streak = 0;
        }
        prev_diff = diff;
        if (diff < 1e-13) break;
    }
    return res;
}

} // namespace hsg
