#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsg/chaos.hpp"
#include "hsg/multiplier.hpp"

#include <cmath>

using namespace hsg;

namespace {

ChaosSample make_chaos(double N, double beta2, std::uint64_t seed, int eps0 = 1,
                       const std::vector<double>& grid = {0.0, 0.25, 0.5}) {
    const auto lat = FrequencyLattice::for_cutoff(N);
    const auto rc = compute_renorm_constants(lat, N, beta2);
    auto gp = sample_gaussian_pair(lat, seed);
    NoisePath noise(seed + 1, 1.0 / (8.0 * N) / 2.0, static_cast<int>(8.0 * N * 2.0));
    const auto path = evolve_convolution(gp, noise, ConvKind::wave, N, grid);
    return build_chaos(path, rc, std::sqrt(beta2), eps0);
}

} // namespace

TEST_CASE("chaos modulus is the renormalization constant, exactly") {
    const auto theta = make_chaos(8.0, two_pi, 42);
    for (const auto& slice : theta.grid_values)
        for (const auto& c : slice)
            CHECK(std::abs(c) == doctest::Approx(theta.rc.gamma_N).epsilon(1e-13));
}

TEST_CASE("opposite-sign chaos is the pathwise conjugate") {
    const auto tp = make_chaos(8.0, two_pi, 43, +1);
    const auto tm = make_chaos(8.0, two_pi, 43, -1);
    for (std::size_t j = 0; j < tp.grid_values.size(); ++j)
        for (std::size_t s = 0; s < tp.grid_values[j].size(); ++s)
            CHECK(std::abs(tp.grid_values[j][s] - std::conj(tm.grid_values[j][s])) < 1e-12);
}

TEST_CASE("zero-coupling chaos is the constant field with unit besov proxy") {
    const auto theta = make_chaos(8.0, 0.0, 44);
    CHECK(theta.rc.gamma_N == 1.0);
    for (const auto& c : theta.grid_values[0]) CHECK(std::abs(c - cplx(1.0, 0.0)) < 1e-12);
    const double nrm = chaos_besov_norm(theta, 0.5, std::numeric_limits<double>::infinity());
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-point function: coincident points give gamma_N^2") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const std::array<double, 3> z = {0.4, 1.0, 2.0};
    const auto res = chaos_two_point(lat, 8.0, two_pi, z, z, 200, 7);
    const double g2 = std::exp(two_pi * compute_sigma_n(lat, 8.0));
    CHECK(res.analytic == doctest::Approx(g2).epsilon(1e-9));
    CHECK(res.mc.real() == doctest::Approx(g2).epsilon(1e-9));
    CHECK(std::fabs(res.mc.imag()) < 1e-9);
}

TEST_CASE("two-point function: MC agrees with the characteristic-function value") {
    const auto lat = FrequencyLattice::for_cutoff(12.0);
    int fails = 0;
    for (int k = 0; k < 5; ++k) {
        const std::array<double, 3> z1 = {0.3 + 0.05 * k, 0.5, 0.2};
        const std::array<double, 3> z2 = {0.6, 0.5 + 0.4 * k, 1.9};
        const auto res = chaos_two_point(lat, 12.0, two_pi, z1, z2, 6000, 100 + k);
        if (std::fabs(res.mc.real() - res.analytic) > 3.0 * res.mc_se) ++fails;
    }
    CHECK(fails <= 1);
}

TEST_CASE("charge bound: single pair is exact, clusters stay order one") {
    ChargeConfiguration pair;
    pair.points = {{0.1, 0.2, 0.3}, {0.7, 4.0, 2.0}};
    const auto rep = charge_bound_check(pair, 32.0, 1.0);
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));

    // Two well-separated dipoles: the pairing bound dominates.
    ChargeConfiguration quad;
    quad.points = {{0.1, 0.0, 0.0}, {0.12, 0.05, 0.0}, {0.5, 3.0, 3.0}, {0.52, 3.05, 3.0}};
    const auto rep2 = charge_bound_check(quad, 32.0, 1.0);
    CHECK(rep2.ratio < 4.0);

    CHECK_THROWS_AS((void)charge_bound_check(ChargeConfiguration{{{0., 0., 0.}}}, 8.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("blowup probe distinguishes the two regimes at small scale") {
    const std::vector<double> Ns = {8, 16, 32, 64};
    const auto sub = blowup_probe(two_pi, Ns, 8);
    const auto super = blowup_probe(3.0 * two_pi, Ns, 8);
    CHECK(sub.second_moment.back() > 0.0);
    CHECK(sub.last_increment < 0.10);
    CHECK(super.increment_ratio.back() > 1.2);
}

TEST_CASE("smoothing moment: smoothed growth is visibly slower") {
    SmoothingReport rep = smoothing_moment(16.0, {4.0, 8.0}, two_pi, 0.05, 24, 5);
    CHECK(rep.fitted_exponent_smoothed < rep.fitted_exponent_unsmoothed);
    CHECK(rep.mod_floor > 0.0);
    CHECK_THROWS_AS((void)smoothing_moment(16.0, {32.0}, two_pi, 0.05, 2, 5),
                    std::invalid_argument);
}
