#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsg/dynamics.hpp"
#include "hsg/multiplier.hpp"

#include <cmath>

using namespace hsg;

namespace {

FlowState gaussian_state(const FrequencyLattice& lat, const RenormConstants& rc,
                         std::uint64_t seed) {
    auto gp = sample_gaussian_pair(lat, seed);
    FlowState st;
    st.u = std::move(gp.u0);
    st.ut = std::move(gp.v0);
    st.rc = rc;
    return st;
}

} // namespace

TEST_CASE("linear flow matches the closed-form damped mode solution") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    const auto rc = compute_renorm_constants(lat, 4.0, two_pi);
    FlowConfig cfg;
    cfg.rc = rc;
    cfg.gamma = 0.0;
    cfg.beta = 1.0;
    cfg.dt = 1.0 / 256.0;
    cfg.noise = FlowNoise::off;
    FlowIntegrator integ(lat, cfg);
    FlowState st;
    st.u = SpectralField(lat, true);
    st.ut = SpectralField(lat, true);
    st.rc = rc;
    st.u.at(2, 1) = cplx(0.3, -0.1);
    st.u.at(-2, -1) = cplx(0.3, 0.1);
    integ.run(st, 256);
    const double w = kg_freq(2, 1);
    const cplx expect = cplx(0.3, -0.1) * std::exp(-0.5) *
                        (std::cos(w) + 0.5 * std::sin(w) / w);
    CHECK(std::abs(st.u.at(2, 1) - expect) < 1e-10);
    CHECK(st.t == doctest::Approx(1.0));
}

TEST_CASE("noise-driven linear flow reproduces the convolution pathwise") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const auto rc = compute_renorm_constants(lat, 8.0, two_pi);
    auto gp = sample_gaussian_pair(lat, 99);
    NoisePath noise(1234, 1.0 / 256.0, 256);
    const auto path = evolve_convolution(gp, noise, ConvKind::kg, 8.0, {0.5, 1.0});

    FlowConfig cfg;
    cfg.rc = rc;
    cfg.gamma = 0.0;
    cfg.beta = 1.0;
    cfg.dt = 1.0 / 256.0;
    cfg.noise = FlowNoise::path_left_point;
    cfg.path = noise;
    FlowIntegrator integ(lat, cfg);
    FlowState st;
    st.u = gp.u0;
    st.ut = gp.v0;
    st.rc = rc;
    integ.run(st, 128, 0);
    double worst = 0.0;
    for (std::size_t s = 0; s < st.u.coeffs.size(); ++s)
        worst = std::max(worst, std::abs(st.u.coeffs[s] - path.raw_fields[0].coeffs[s]));
    CHECK(worst < 1e-10);
    integ.run(st, 128, 128);
    worst = 0.0;
    for (std::size_t s = 0; s < st.u.coeffs.size(); ++s)
        worst = std::max(worst, std::abs(st.u.coeffs[s] - path.raw_fields[1].coeffs[s]));
    CHECK(worst < 1e-10);
}

TEST_CASE("step halving shows second-order self-convergence") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    const auto rc = compute_renorm_constants(lat, 4.0, two_pi);
    std::vector<SpectralField> results;
    for (int level = 0; level < 3; ++level) {
        FlowConfig cfg;
        cfg.rc = rc;
        cfg.gamma = 1.0;
        cfg.beta = std::sqrt(two_pi);
        cfg.dt = 1.0 / (256 << level);
        cfg.noise = FlowNoise::off;
        FlowIntegrator integ(lat, cfg);
        auto st = gaussian_state(lat, rc, 7);
        // scale down for a smooth nonlinearity regime
        for (auto& c : st.u.coeffs) c *= 0.3;
        for (auto& c : st.ut.coeffs) c *= 0.3;
        integ.run(st, 64 << level);
        results.push_back(st.u);
    }
    auto diff = [&](const SpectralField& a, const SpectralField& b) {
        double d = 0.0;
        for (std::size_t s = 0; s < a.coeffs.size(); ++s) d += std::norm(a.coeffs[s] - b.coeffs[s]);
        return std::sqrt(d);
    };
    // second order: successive step-halving differences shrink ~4x
    const double e0 = diff(results[0], results[1]);
    const double e1 = diff(results[1], results[2]);
    CHECK(e0 / e1 > 3.0);
    CHECK(e0 / e1 < 5.5);
}

TEST_CASE("undamped noiseless flow conserves the interaction energy") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const auto rc = compute_renorm_constants(lat, 8.0, two_pi);
    FlowConfig cfg;
    cfg.rc = rc;
    cfg.gamma = 1.0;
    cfg.beta = std::sqrt(two_pi);
    cfg.dt = 1.0 / 512.0;
    cfg.damping = false;
    cfg.noise = FlowNoise::off;
    FlowIntegrator integ(lat, cfg);
    auto st = gaussian_state(lat, rc, 21);
    for (auto& c : st.u.coeffs) c *= 0.5;
    for (auto& c : st.ut.coeffs) c *= 0.5;
    const double e0 = flow_energy(st, cfg.gamma, cfg.beta);
    integ.run(st, 512);
    const double e1 = flow_energy(st, cfg.gamma, cfg.beta);
    // O(dt^2) drift per unit time
    CHECK(std::fabs(e1 - e0) < 50.0 * cfg.dt * cfg.dt * std::fabs(e0));
}

TEST_CASE("dt guard rejects oversized steps") {
    const auto lat = FrequencyLattice::for_cutoff(32.0);
    const auto rc = compute_renorm_constants(lat, 32.0, two_pi);
    FlowConfig cfg;
    cfg.rc = rc;
    cfg.dt = 1.0 / 64.0; // dt_max(32) = 1/256
    CHECK_THROWS_AS((void)FlowIntegrator(lat, cfg), std::invalid_argument);
}

TEST_CASE("gibbs ensemble: weights, envelope, ess") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const auto rc = compute_renorm_constants(lat, 8.0, two_pi);
    const double beta = std::sqrt(two_pi);
    auto ens = sample_gibbs_ensemble(lat, rc, 0.0, beta, 64, 3);
    CHECK(ens.ess == doctest::Approx(64.0));
    for (double lw : ens.log_weights) CHECK(lw == 0.0);

    auto ens2 = sample_gibbs_ensemble(lat, rc, 0.3, beta, 64, 3);
    const double envelope = 0.3 * rc.gamma_N / beta * two_pi * two_pi;
    for (double lw : ens2.log_weights) CHECK(std::fabs(lw) <= envelope * (1 + 1e-12));
    CHECK(ens2.ess > 16.0);
    CHECK_FALSE(ens2.degenerate);

    // unit coupling: the weight spread is genuinely heavy at this beta
    auto ens3 = sample_gibbs_ensemble(lat, rc, 1.0, beta, 64, 3);
    CHECK(ens3.ess < ens2.ess);
}

TEST_CASE("linear invariance control: free field is stationary") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const auto rc = compute_renorm_constants(lat, 8.0, two_pi);
    const double beta = std::sqrt(two_pi);
    auto ens = sample_gibbs_ensemble(lat, rc, 0.0, beta, 200, 17);
    const auto rep = invariance_experiment(ens, 0.5, 1.0 / 256.0, 0.0, beta, 4242);
    for (double z : rep.z_scores) CHECK(std::fabs(z) <= 3.5);
    const auto rep0 = invariance_experiment(ens, 0.0, 1.0 / 256.0, 0.0, beta, 4242);
    for (double z : rep0.z_scores) CHECK(z == 0.0);
}

TEST_CASE("picard iteration: zero chaos gives the zero remainder") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    const auto rc = compute_renorm_constants(lat, 4.0, two_pi);
    ChaosSample theta;
    theta.rc = rc;
    theta.beta = std::sqrt(two_pi);
    theta.lattice = lat;
    theta.times = {0.0, 0.125, 0.25};
    theta.grid_values.assign(3, std::vector<cplx>(lat.num_modes(), cplx{0.0, 0.0}));
    std::vector<RealField2D> psid(3, RealField2D(lat));
    const auto res = solve_remainder_picard(psid, theta, 1.0, 4);
    for (const auto& v : res.v)
        for (const auto& c : v.coeffs) CHECK(std::abs(c) == 0.0);
    CHECK_FALSE(res.diverged);
}

TEST_CASE("picard iteration contracts on a short horizon") {
    const double N = 8.0;
    const auto lat = FrequencyLattice::for_cutoff(N);
    const auto rc = compute_renorm_constants(lat, N, two_pi);
    const double beta = std::sqrt(two_pi);
    const double dt = 1.0 / 128.0;
    const int steps = 16;
    auto gp = sample_gaussian_pair(lat, 5);
    NoisePath noise(55, dt, steps);
    std::vector<double> grid(steps + 1);
    for (int j = 0; j <= steps; ++j) grid[j] = j * dt;
    const auto pk = evolve_convolution(gp, noise, ConvKind::kg, N, grid);
    const auto pw = evolve_convolution(gp, noise, ConvKind::wave, N, grid);
    const auto theta = build_chaos(pw, rc, beta, +1);
    std::vector<RealField2D> psid;
    for (const auto& d : convolution_difference(pk, pw)) psid.push_back(inverse_transform(d));
    const auto res = solve_remainder_picard(psid, theta, 1.0, 10);
    CHECK_FALSE(res.diverged);
    REQUIRE(res.diff_norms.size() >= 4);
    // geometric contraction after the first correction
    CHECK(res.diff_norms[2] < res.diff_norms[1]);
    CHECK(res.diff_norms[3] < res.diff_norms[2]);
}
