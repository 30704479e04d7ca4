#include "hsg/chaos.hpp"

#include "hsg/bump.hpp"
#include "hsg/fft.hpp"
#include "hsg/multiplier.hpp"
#include "hsg/norms.hpp"
#include "hsg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace hsg {

ChaosSample build_chaos(const ConvolutionPath& path, const RenormConstants& rc, double beta,
                        int epsilon0) {
    if (path.kind != ConvKind::wave)
        throw std::invalid_argument("build_chaos: path must be the wave convolution");
    if (path.N != rc.N) throw std::invalid_argument("build_chaos: truncation level mismatch");
    ChaosSample out;
    out.epsilon0 = epsilon0;
    out.beta = beta;
    out.rc = rc;
    out.times = path.times;
    out.lattice = path.raw_fields.empty() ? FrequencyLattice() : path.raw_fields[0].lattice;
    out.grid_values.reserve(path.times.size());
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const RealField2D psi = inverse_transform(path.truncated(i));
        std::vector<cplx> slice(psi.values.size());
        for (std::size_t s = 0; s < slice.size(); ++s) {
            const double phase = epsilon0 * beta * psi.values[s];
            slice[s] = rc.gamma_N * cplx(std::cos(phase), std::sin(phase));
        }
        out.grid_values.push_back(std::move(slice));
    }
    return out;
}

double besov_slice_sup(const FrequencyLattice& lat, const std::vector<cplx>& slice, double alpha) {
    const int G = lat.grid_size();
    std::vector<cplx> work = slice;
    fft::dft2d(work.data(), G, -1);
    const double fwd = two_pi / (static_cast<double>(G) * G);
    for (int k1 = 0; k1 < G; ++k1) {
        const double n1 = lat.mode_of_index(k1);
        for (int k2 = 0; k2 < G; ++k2) {
            const double n2 = lat.mode_of_index(k2);
            const double sym = std::pow(1.0 + n1 * n1 + n2 * n2, -0.5 * alpha);
            work[static_cast<std::size_t>(k1) * G + k2] *= fwd * sym;
        }
    }
    fft::dft2d(work.data(), G, +1);
    double sup = 0.0;
    for (const auto& c : work) sup = std::max(sup, std::abs(c) / two_pi);
    return sup;
}

double chaos_besov_norm(const ChaosSample& theta, double alpha, double q_time) {
    if (alpha <= 0.0) throw std::invalid_argument("chaos_besov_norm: alpha must be positive");
    if (theta.grid_values.empty()) return 0.0;
    std::vector<double> sups;
    sups.reserve(theta.grid_values.size());
    for (const auto& slice : theta.grid_values)
        sups.push_back(besov_slice_sup(theta.lattice, slice, alpha));
    if (std::isinf(q_time)) return *std::max_element(sups.begin(), sups.end());
    const double T = theta.times.back() - theta.times.front();
    const double dt = sups.size() > 1 ? T / static_cast<double>(sups.size() - 1) : 1.0;
    double acc = 0.0;
    for (double s : sups) acc += std::pow(s, q_time) * dt;
    return std::pow(acc, 1.0 / q_time);
}

TwoPointResult chaos_two_point(const FrequencyLattice& lat, double N, double beta2,
                               const std::array<double, 3>& z1, const std::array<double, 3>& z2,
                               int samples, std::uint64_t seed) {
    const double beta = std::sqrt(beta2);
    TwoPointResult res;

    // Analytic value from the covariance.
    const double v1 = covariance_gamma(lat, N, z1[0], z1[0], {0.0, 0.0}, CovMode::analytic_sum);
    const double v2 = covariance_gamma(lat, N, z2[0], z2[0], {0.0, 0.0}, CovMode::analytic_sum);
    const double g12 = covariance_gamma(lat, N, z1[0], z2[0], {z1[1] - z2[1], z1[2] - z2[2]},
                                        CovMode::analytic_sum);
    const double sigma = compute_sigma_n(lat, N);
    // gamma_N^2 e^{-beta^2 (v1+v2)/2 + beta^2 g12}, gamma_N^2 = e^{beta^2 sigma}
    res.analytic = std::exp(beta2 * (sigma - 0.5 * (v1 + v2) + g12));

    if (samples > 0) {
        std::vector<double> times;
        std::vector<std::array<double, 2>> pts;
        int i1, i2;
        if (z1[0] == z2[0]) {
            times = {z1[0]};
            pts = {{z1[1], z1[2]}, {z2[1], z2[2]}};
            i1 = 0;
            i2 = 1;
        } else if (z1[0] < z2[0]) {
            times = {z1[0], z2[0]};
            pts = {{z1[1], z1[2]}, {z2[1], z2[2]}};
            i1 = 0 * 2 + 0;
            i2 = 1 * 2 + 1;
        } else {
            times = {z2[0], z1[0]};
            pts = {{z2[1], z2[2]}, {z1[1], z1[2]}};
            i2 = 0 * 2 + 0;
            i1 = 1 * 2 + 1;
        }
        SnapshotSampler sampler(lat, ConvKind::wave, N, times);
        sampler.set_points(pts);
        const double g2 = std::exp(beta2 * sigma);
        cplx acc{0.0, 0.0};
        double acc_re2 = 0.0;
        std::vector<double> vals;
        for (int s = 0; s < samples; ++s) {
            sampler.sample_points(splitmix64(seed + static_cast<std::uint64_t>(s)), vals);
            const double phase = beta * (vals[i1] - vals[i2]);
            const cplx term = g2 * cplx(std::cos(phase), std::sin(phase));
            acc += term;
            acc_re2 += term.real() * term.real();
        }
        res.mc = acc / static_cast<double>(samples);
        const double mean_re = res.mc.real();
        const double var_re = std::max(acc_re2 / samples - mean_re * mean_re, 0.0);
        res.mc_se = std::sqrt(var_re / samples);
    }
    return res;
}

namespace {

double torus_dist(double dx1, double dx2) {
    dx1 = std::remainder(dx1, two_pi);
    dx2 = std::remainder(dx2, two_pi);
    return std::hypot(dx1, dx2);
}

double log_potential(const std::array<double, 3>& a, const std::array<double, 3>& b, double N) {
    const double d = std::fabs(a[0] - b[0]) + torus_dist(a[1] - b[1], a[2] - b[2]) + 1.0 / N;
    return std::log(d);
}

} // namespace

ChargeReport charge_bound_check(const ChargeConfiguration& cfg, double N, double lambda) {
    const std::size_t n = cfg.points.size();
    if (n == 0 || n % 2 != 0) throw std::invalid_argument("charge_bound_check: need 2p points");
    const std::size_t p = n / 2;
    if (p > 4) throw std::invalid_argument("charge_bound_check: p <= 4");

    ChargeReport rep;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const int ej = (j % 2 == 1) ? 1 : -1; // even positions (1-based) carry +1
            const int ek = (k % 2 == 1) ? 1 : -1;
            rep.log_lhs += ej * ek * lambda * log_potential(cfg.points[j], cfg.points[k], N);
        }

    // Exhaustive pairing enumeration: even-index charge 2j pairs with odd
    // charge 2 sigma(j) - 1 (1-based), i.e. indices 2j+1 and 2 sigma(j).
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), 0u);
    double best = -std::numeric_limits<double>::infinity();
    do {
        double lp = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            lp -= lambda * log_potential(cfg.points[2 * j + 1], cfg.points[2 * perm[j]], N);
        best = std::max(best, lp);
    } while (std::next_permutation(perm.begin(), perm.end()));
    rep.log_rhs = best;
    rep.ratio = std::exp(rep.log_lhs - rep.log_rhs);
    return rep;
}

BlowupReport blowup_probe(double beta2, const std::vector<double>& N_values, int gauss_points) {
    BlowupReport rep;
    rep.beta2 = beta2;
    rep.N_values = N_values;

    // Time bump supported strictly inside (0,1); constant in space.
    auto phi_t = [](double t) { return bump::step_down(std::fabs((t - 0.5) / 0.42)); };

    // Gauss-Legendre nodes on [0,1] (supports the bump comfortably).
    std::vector<double> gx(gauss_points), gw(gauss_points);
    {
        // Newton iteration on Legendre polynomials.
        const int m = gauss_points;
        for (int i = 0; i < m; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                const double dp = m * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double dp = m * (x * p1 - p0) / (x * x - 1.0);
            gx[i] = 0.5 * (x + 1.0);
            gw[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    for (double N : N_values) {
        const auto lat = FrequencyLattice::for_cutoff(N);
        const double sigma = compute_sigma_n(lat, N);
        const double h = lat.grid_spacing();

        // Diagonal variances at the nodes.
        std::vector<double> vdiag(gauss_points);
        for (int i = 0; i < gauss_points; ++i)
            vdiag[i] = covariance_gamma(lat, N, gx[i], gx[i], {0.0, 0.0}, CovMode::analytic_sum);

        double total = 0.0;
        for (int i = 0; i < gauss_points; ++i) {
            for (int j = i; j < gauss_points; ++j) {
                const auto grid = covariance_gamma_grid(lat, N, gx[i], gx[j]);
                // integral over the spatial offset of the two-point function
                double w_int = 0.0;
                for (double g : grid.values)
                    w_int += std::exp(beta2 * (sigma - 0.5 * (vdiag[i] + vdiag[j]) + g));
                w_int *= h * h;
                const double sym = (i == j) ? 1.0 : 2.0;
                total += sym * gw[i] * gw[j] * phi_t(gx[i]) * phi_t(gx[j]) * w_int;
            }
        }
        total *= two_pi * two_pi; // the x1, x2 integrals of the constant spatial profile
        rep.second_moment.push_back(total);
    }

    for (std::size_t k = 1; k < rep.second_moment.size(); ++k)
        rep.increment_ratio.push_back(rep.second_moment[k] / rep.second_moment[k - 1]);
    if (!rep.increment_ratio.empty())
        rep.last_increment = rep.increment_ratio.back() - 1.0;
    return rep;
}

SmoothingReport smoothing_moment(double N, const std::vector<double>& N0_values, double beta2,
                                 double eps, int samples, std::uint64_t seed, int threads) {
    SmoothingReport rep;
    rep.N = N;
    rep.beta2 = beta2;
    rep.eps = eps;
    rep.N0_values = N0_values;

    const auto lat = FrequencyLattice::for_cutoff(N);
    const int G = lat.grid_size();
    const std::size_t S = lat.num_modes();
    for (double N0 : N0_values)
        if (1.6 * N0 >= lat.M)
            throw std::invalid_argument("smoothing_moment: N0 exceeds lattice resolution");

    const auto rc = compute_renorm_constants(lat, N, beta2);
    const double beta = std::sqrt(beta2);
    const double b = -0.5 - eps;

    // Space-time grid: window [-4,4], slices at dt = 1/128; the restricted
    // chaos lives on t in [0,1].
    const int nt = 1024;
    const TimeGrid tg = TimeGrid::window(4.0, nt);
    rep.mod_floor = 0.5 * tg.dtau();
    const int j0 = static_cast<int>(std::lround((0.0 - tg.t0) / tg.dt));
    const int j1 = static_cast<int>(std::lround((1.0 - tg.t0) / tg.dt));
    const int jstar = static_cast<int>(std::lround((0.5 - tg.t0) / tg.dt));
    const int nslices = j1 - j0 + 1;

    // Union of the dyadic annuli, grouped by |n|^2 for the radial tau-kernel.
    struct AnnulusMode {
        int n1, n2;
        int row; // kernel row
    };
    std::vector<AnnulusMode> modes;
    std::unordered_map<long long, int> row_of;
    const double rho_min = 0.625 * *std::min_element(N0_values.begin(), N0_values.end());
    const double rho_max = 1.6 * *std::max_element(N0_values.begin(), N0_values.end());
    for (int n1 = -lat.M + 1; n1 < lat.M; ++n1)
        for (int n2 = -lat.M + 1; n2 < lat.M; ++n2) {
            const double rho = std::sqrt(static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2);
            if (rho <= rho_min || rho >= rho_max) continue;
            const long long r2 = static_cast<long long>(n1) * n1 + static_cast<long long>(n2) * n2;
            auto it = row_of.find(r2);
            if (it == row_of.end()) it = row_of.emplace(r2, static_cast<int>(row_of.size())).first;
            modes.push_back({n1, n2, it->second});
        }

    // Radial temporal kernels K_rho(m) = (1/nt) sum_k sym(tau_k, rho) e^{2 pi i k m / nt},
    // kept at the lags m = jstar - j actually used.
    const int nrows = static_cast<int>(row_of.size());
    std::vector<cplx> kernel(static_cast<std::size_t>(nrows) * nslices);
    {
        std::vector<std::pair<long long, int>> rows(row_of.begin(), row_of.end());
        parallel_for(rows.size(), [&](std::size_t ri) {
            const double rho = std::sqrt(static_cast<double>(rows[ri].first));
            std::vector<cplx> sym(nt);
            for (int k = 0; k < nt; ++k)
                sym[k] = box_symbol(tg.tau(k), rho, b, rep.mod_floor);
            fft::dft1d(sym.data(), nt, +1);
            for (int j = j0; j <= j1; ++j) {
                int m = (jstar - j) % nt;
                if (m < 0) m += nt;
                kernel[static_cast<std::size_t>(rows[ri].second) * nslices + (j - j0)] =
                    sym[m] / static_cast<double>(nt);
            }
        }, threads);
    }

    // Per-sample accumulation of |X|^2 for both estimators and every N0.
    const std::size_t nN0 = N0_values.size();
    std::vector<double> acc_s(static_cast<std::size_t>(samples) * nN0);
    std::vector<double> acc_u(static_cast<std::size_t>(samples) * nN0);

    // Slice times for the exact transition sampler.
    std::vector<double> slice_times(nslices);
    for (int j = 0; j < nslices; ++j) slice_times[j] = tg.time(j0 + j);

    const SnapshotSampler sampler(lat, ConvKind::wave, N, slice_times);

    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t sample) {
        const auto fields = sampler.sample(splitmix64(seed + sample * 1315423911ull));
        std::vector<cplx> xacc(modes.size(), cplx{0.0, 0.0});
        std::vector<cplx> theta_star;
        std::vector<cplx> slice(S);
        for (int j = 0; j < nslices; ++j) {
            // Physical chaos slice.
            const SpectralField psi = project_cutoff(fields[j], N);
            slice.assign(psi.coeffs.begin(), psi.coeffs.end());
            fft::dft2d(slice.data(), G, +1);
            for (auto& c : slice) {
                const double phase = beta * c.real() / two_pi;
                c = rc.gamma_N * cplx(std::cos(phase), std::sin(phase));
            }
            fft::dft2d(slice.data(), G, -1);
            const double fscale = two_pi / (static_cast<double>(G) * G);
            // Accumulate theta_hat against the temporal kernel.  The grid
            // measures dt dtau / (2 pi) = 1/nt are folded into the kernel.
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const auto& md = modes[m];
                const cplx th =
                    fscale * slice[static_cast<std::size_t>(lat.index_of_mode(md.n1)) * G +
                                   lat.index_of_mode(md.n2)];
                xacc[m] += th * kernel[static_cast<std::size_t>(md.row) * nslices + j];
            }
            if (j0 + j == jstar) {
                theta_star.resize(modes.size());
                for (std::size_t m = 0; m < modes.size(); ++m)
                    theta_star[m] =
                        fscale * slice[static_cast<std::size_t>(lat.index_of_mode(modes[m].n1)) * G +
                                       lat.index_of_mode(modes[m].n2)];
            }
        }
        for (std::size_t q = 0; q < nN0; ++q) {
            const double N0 = N0_values[q];
            cplx xs{0.0, 0.0}, xu{0.0, 0.0};
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const auto& md = modes[m];
                const double rho = std::sqrt(static_cast<double>(md.n1) * md.n1 +
                                             static_cast<double>(md.n2) * md.n2);
                const double blk = bump::annulus(rho / N0);
                if (blk == 0.0) continue;
                const cplx dsym(0.0, blk * md.n1); // d/dx1 with the dyadic block
                xs += dsym * xacc[m];
                xu += dsym * theta_star[m];
            }
            // e_n(0) normalization of the point evaluation
            acc_s[sample * nN0 + q] = std::norm(xs / two_pi);
            acc_u[sample * nN0 + q] = std::norm(xu / two_pi);
        }
    }, threads);

    auto reduce = [&](const std::vector<double>& acc, std::vector<double>& mean,
                      std::vector<double>& se) {
        mean.assign(nN0, 0.0);
        se.assign(nN0, 0.0);
        for (int s = 0; s < samples; ++s)
            for (std::size_t q = 0; q < nN0; ++q) mean[q] += acc[static_cast<std::size_t>(s) * nN0 + q];
        for (std::size_t q = 0; q < nN0; ++q) mean[q] /= samples;
        for (int s = 0; s < samples; ++s)
            for (std::size_t q = 0; q < nN0; ++q) {
                const double d = acc[static_cast<std::size_t>(s) * nN0 + q] - mean[q];
                se[q] += d * d;
            }
        for (std::size_t q = 0; q < nN0; ++q)
            se[q] = std::sqrt(se[q] / samples / std::max(1, samples - 1));
    };
    reduce(acc_s, rep.smoothed, rep.smoothed_se);
    reduce(acc_u, rep.unsmoothed, rep.unsmoothed_se);

    auto fit = [&](const std::vector<double>& y) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const int n = static_cast<int>(nN0);
        for (int i = 0; i < n; ++i) {
            const double X = std::log(N0_values[i]);
            const double Y = std::log(std::max(y[i], 1e-300));
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    rep.fitted_exponent_smoothed = fit(rep.smoothed);
    rep.fitted_exponent_unsmoothed = fit(rep.unsmoothed);
    return rep;
}

} // namespace hsg
