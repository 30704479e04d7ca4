#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsg/bump.hpp"
#include "hsg/lattice.hpp"
#include "hsg/multiplier.hpp"
#include "hsg/rng.hpp"

#include <cmath>
#include <limits>

using namespace hsg;

namespace {

SpectralField random_band_limited(const FrequencyLattice& lat, int band, std::uint64_t seed) {
    SpectralField f(lat, true);
    for (int n1 = 0; n1 <= band; ++n1)
        for (int n2 = (n1 == 0 ? 0 : -band); n2 <= band; ++n2) {
            RngStream rng(seed, mode_stream(n1, n2));
            if (n1 == 0 && n2 == 0) {
                f.at(0, 0) = rng.normal();
                continue;
            }
            const cplx z = rng.cnormal(1.0);
            f.at(n1, n2) = z;
            f.at(-n1, -n2) = std::conj(z);
        }
    return f;
}

} // namespace

TEST_CASE("lattice invariants") {
    CHECK_THROWS(FrequencyLattice(4, 8.0));
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    CHECK(lat.M == 16);
    CHECK(lat.grid_size() == 32);
    CHECK(lat.mode_of_index(0) == 0);
    CHECK(lat.mode_of_index(31) == -1);
    CHECK(lat.index_of_mode(-16) == 16);
}

TEST_CASE("constant field transforms to the zero mode only") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    RealField2D f(lat);
    const double c = 2.5;
    for (auto& v : f.values) v = c;
    const auto u = forward_transform(f);
    CHECK(u.at(0, 0).real() == doctest::Approx(two_pi * c).epsilon(1e-12));
    CHECK(std::abs(u.at(1, 0)) < 1e-12);
    CHECK(std::abs(u.at(-3, 2)) < 1e-12);
}

TEST_CASE("cosine transforms to the two matching modes") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    RealField2D f(lat);
    const int G = lat.grid_size();
    for (int j1 = 0; j1 < G; ++j1)
        for (int j2 = 0; j2 < G; ++j2) f.at(j1, j2) = std::cos(f.grid_x(j1));
    const auto u = forward_transform(f);
    CHECK(u.at(1, 0).real() == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(u.at(-1, 0).real() == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(std::abs(u.at(0, 0)) < 1e-10);
    CHECK(std::abs(u.at(0, 1)) < 1e-10);
}

TEST_CASE("round trip on random band-limited data") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const auto u = random_band_limited(lat, 7, 11);
    const auto f = inverse_transform(u);
    const auto u2 = forward_transform(f);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
        num += std::norm(u.coeffs[i] - u2.coeffs[i]);
        den += std::norm(u.coeffs[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-12);
    CHECK(u.hermitian_defect() < 1e-12);
}

TEST_CASE("non-finite input is rejected") {
    const auto lat = FrequencyLattice::for_cutoff(2.0);
    RealField2D f(lat);
    f.values[3] = std::nan("");
    CHECK_THROWS_AS((void)forward_transform(f), std::invalid_argument);
}

TEST_CASE("parseval identity for band-limited fields") {
    const auto lat = FrequencyLattice::for_cutoff(8.0);
    const auto u = random_band_limited(lat, 6, 5);
    const auto f = inverse_transform(u);
    double grid_l2 = 0.0;
    for (double v : f.values) grid_l2 += v * v;
    grid_l2 *= lat.grid_spacing() * lat.grid_spacing();
    double coef_l2 = 0.0;
    for (const auto& c : u.coeffs) coef_l2 += std::norm(c);
    CHECK(grid_l2 == doctest::Approx(coef_l2).epsilon(1e-10));
}

TEST_CASE("cutoff profile: plateau, support, monotonicity") {
    CHECK(bump::chi(0.0) == 1.0);
    CHECK(bump::chi(0.5) == 1.0);
    CHECK(bump::chi(1.0) == 0.0);
    CHECK(bump::chi(1.7) == 0.0);
    double prev = 1.0;
    for (double r = 0.0; r <= 1.2; r += 0.01) {
        const double v = bump::chi(r);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("dyadic annuli sum to one away from zero") {
    for (double r : {0.3, 1.0, 2.7, 5.0, 17.3, 100.0}) {
        double total = 0.0;
        for (int j = -12; j <= 12; ++j) total += bump::annulus(r / std::ldexp(1.0, j));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("multiplier: identity, narrow cutoff, green cross-check") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    const auto u = random_band_limited(lat, 3, 2);

    const auto id = apply_multiplier(u, MultiplierSpec::bessel(0.0));
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        CHECK(std::abs(id.coeffs[i] - u.coeffs[i]) < 1e-14);

    // Cutoff below 1/2 keeps only the zero mode with unit weight.
    const auto z = apply_multiplier(u, MultiplierSpec::cutoff(0.4));
    CHECK(z.at(0, 0) == u.at(0, 0));
    CHECK(std::abs(z.at(1, 0)) == 0.0);

    // Bessel(-2) on delta-like data reproduces the 1/(2 pi <n>^2) profile
    // scaled by 2 pi.
    SpectralField delta(lat, true);
    for (auto& c : delta.coeffs) c = 1.0 / two_pi;
    const auto g = apply_multiplier(delta, MultiplierSpec::bessel(-2.0));
    for (int n1 : {0, 1, 3})
        for (int n2 : {0, -2, 1}) {
            const double expect = 1.0 / (two_pi * (1.0 + n1 * n1 + n2 * n2));
            CHECK(g.at(n1, n2).real() == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("multiplier rejects non-finite symbols") {
    const auto lat = FrequencyLattice::for_cutoff(2.0);
    SpectralField u(lat, true);
    u.at(0, 0) = 1.0;
    auto bad = MultiplierSpec::custom([](int n1, int n2) {
        return (n1 == 0 && n2 == 0) ? std::numeric_limits<double>::infinity() : 1.0;
    });
    CHECK_THROWS_AS((void)apply_multiplier(u, bad), std::invalid_argument);
}

TEST_CASE("propagators: t=0 limits and the single-mode value") {
    const auto lat = FrequencyLattice::for_cutoff(2.0);
    auto u = random_band_limited(lat, 2, 3);

    const auto s0 = wave_propagator_apply(u, 0.0, PropagatorKind::sin_over_norm_wave, false);
    CHECK(s0.l2_norm() == 0.0);
    const auto c0 = wave_propagator_apply(u, 0.0, PropagatorKind::cos_kg, false);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        CHECK(std::abs(c0.coeffs[i] - u.coeffs[i]) < 1e-14);

    SpectralField single(lat, true);
    single.at(1, 0) = 1.0;
    single.at(-1, 0) = 1.0;
    const auto s = wave_propagator_apply(single, M_PI / 2.0, PropagatorKind::sin_over_norm_wave, false);
    CHECK(s.at(1, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("propagator group law (trig addition) holds mode-wise") {
    const auto lat = FrequencyLattice::for_cutoff(4.0);
    const auto u = random_band_limited(lat, 4, 9);
    const double t1 = 0.37, t2 = 0.81;
    for (bool kg : {false, true}) {
        const auto ck = kg ? PropagatorKind::cos_kg : PropagatorKind::cos_wave;
        const auto sk = kg ? PropagatorKind::sin_over_norm_kg : PropagatorKind::sin_over_norm_wave;
        // cos(t1+t2) = cos t1 cos t2 - w^2 * (sin t1 / w)(sin t2 / w)
        const auto lhs = wave_propagator_apply(u, t1 + t2, ck, false);
        const auto c1c2 = wave_propagator_apply(wave_propagator_apply(u, t1, ck, false), t2, ck, false);
        auto s1s2 = wave_propagator_apply(wave_propagator_apply(u, t1, sk, false), t2, sk, false);
        s1s2 = apply_multiplier(s1s2, kg ? MultiplierSpec::kg(2.0) : MultiplierSpec::abs_grad(2.0));
        double worst = 0.0;
        for (std::size_t i = 0; i < u.coeffs.size(); ++i)
            worst = std::max(worst, std::abs(lhs.coeffs[i] - (c1c2.coeffs[i] - s1s2.coeffs[i])));
        CHECK(worst < 1e-12);
    }
}
