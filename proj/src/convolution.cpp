#include "hsg/convolution.hpp"

#include "hsg/bump.hpp"
#include "hsg/multiplier.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace hsg {

namespace {

constexpr std::uint64_t kTagSnapshot = 0x51A9'77E3'0000'0003ull;

double sinc_freq(double w, double t) { return w == 0.0 ? t : std::sin(t * w) / w; }

// int_0^h exp(-s) s^k ds = k! (1 - e^{-h} sum_{j<=k} h^j/j!)
double expint_poly(int k, double h) {
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    double partial = 0.0, hp = 1.0, jfact = 1.0;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            hp *= h;
            jfact *= j;
        }
        partial += hp / jfact;
    }
    return fact * (1.0 - std::exp(-h) * partial);
}

} // namespace

void mode_noise_covariance(double w, double h, double& q11, double& q12, double& q22) {
    if (w < 1e-3) {
        // Taylor branch, exact through O(w^2); avoids the O(w^2) cancellation
        // in the closed form.
        const double i0 = expint_poly(0, h), i1 = expint_poly(1, h), i2 = expint_poly(2, h),
                     i3 = expint_poly(3, h), i4 = expint_poly(4, h);
        const double w2 = w * w;
        q11 = 2.0 * (i2 - w2 * i4 / 3.0);
        q12 = 2.0 * (i1 - 0.5 * i2 - w2 * (2.0 * i3 / 3.0 - i4 / 6.0));
        q22 = 2.0 * (i0 - i1 + 0.25 * i2 - w2 * (i2 - 2.0 * i3 / 3.0 + i4 / 12.0));
        return;
    }
    const double c1 = 1.0 - std::exp(-h);
    const cplx mu(1.0, -2.0 * w);
    const cplx z = (1.0 - std::exp(-h) * std::exp(cplx(0.0, 2.0 * w * h))) / mu;
    const double c2 = z.real();
    const double c3 = z.imag();
    const double w2 = w * w;
    q11 = (c1 - c2) / w2;
    q12 = c3 / w - 0.5 * (c1 - c2) / w2;
    q22 = (c1 + c2) - c3 / w + 0.25 * (c1 - c2) / w2;
}

ModeTransition mode_transition(double w, double h) {
    ModeTransition tr{};
    const double damp = std::exp(-0.5 * h);
    const double sc = sinc_freq(w, h);
    const double co = std::cos(w * h);
    tr.a11 = damp * (co + 0.5 * sc);
    tr.a12 = damp * sc;
    tr.a21 = -damp * (w * w + 0.25) * sc;
    tr.a22 = damp * (co - 0.5 * sc);
    const double sqrt2 = std::sqrt(2.0);
    tr.b1 = sqrt2 * damp * sc;
    tr.b2 = sqrt2 * damp * (co - 0.5 * sc);
    double q11, q12, q22;
    mode_noise_covariance(w, h, q11, q12, q22);
    tr.l11 = std::sqrt(std::max(q11, 0.0));
    tr.l21 = tr.l11 > 0.0 ? q12 / tr.l11 : 0.0;
    const double rem = q22 - tr.l21 * tr.l21;
    tr.l22 = rem > 0.0 ? std::sqrt(rem) : 0.0;
    return tr;
}

SpectralField ConvolutionPath::truncated(std::size_t i) const {
    return project_cutoff(raw_fields.at(i), N);
}

ConvolutionPath evolve_convolution(const GaussianPair& data, const NoisePath& noise, ConvKind kind,
                                   double N, const std::vector<double>& t_grid) {
    const FrequencyLattice lat = data.u0.lattice;
    if (lat.N_cutoff < N) throw std::invalid_argument("evolve_convolution: lattice does not resolve N");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (t_grid[i + 1] <= t_grid[i])
            throw std::invalid_argument("evolve_convolution: t_grid must be increasing");
    if (!t_grid.empty() && t_grid.back() > noise.horizon() + 1e-12)
        throw std::invalid_argument("evolve_convolution: t_grid exceeds noise horizon");

    std::vector<int> out_step;
    for (double t : t_grid) {
        const double j = t / noise.dt;
        const int ji = static_cast<int>(std::lround(j));
        if (std::fabs(j - ji) > 1e-9)
            throw std::invalid_argument("evolve_convolution: t_grid must sit on the noise grid");
        out_step.push_back(ji);
    }

    const int M = lat.M;

    struct Mode {
        int n1, n2;
        int tr_index;
    };
    std::vector<Mode> modes;
    std::vector<ModeTransition> transitions;
    std::unordered_map<long long, int> tr_index_of;
    for (int n1 = -M + 1; n1 < M; ++n1)
        for (int n2 = -M + 1; n2 < M; ++n2) {
            if (n1 < 0 || (n1 == 0 && n2 < 0)) continue;
            const long long r2 = static_cast<long long>(n1) * n1 + static_cast<long long>(n2) * n2;
            auto it = tr_index_of.find(r2);
            if (it == tr_index_of.end()) {
                const double w = kind == ConvKind::kg ? std::sqrt(0.75 + static_cast<double>(r2))
                                                      : std::sqrt(static_cast<double>(r2));
                transitions.push_back(mode_transition(w, noise.dt));
                it = tr_index_of.emplace(r2, static_cast<int>(transitions.size()) - 1).first;
            }
            modes.push_back({n1, n2, it->second});
        }

    std::vector<ModeOUState> states(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i)
        states[i] = {modes[i].n1, modes[i].n2, data.u0.at(modes[i].n1, modes[i].n2),
                     data.v0.at(modes[i].n1, modes[i].n2), 0.0};

    ConvolutionPath path;
    path.kind = kind;
    path.N = N;
    path.times = t_grid;

    auto emit = [&]() {
        SpectralField f(lat, true);
        for (const auto& st : states) {
            f.at(st.n1, st.n2) = st.pos;
            if (!(st.n1 == 0 && st.n2 == 0)) f.at(-st.n1, -st.n2) = std::conj(st.pos);
        }
        path.raw_fields.push_back(std::move(f));
    };

    std::size_t next_out = 0;
    const int last_step = out_step.empty() ? 0 : out_step.back();
    if (next_out < out_step.size() && out_step[next_out] == 0) {
        emit();
        ++next_out;
    }
    for (int j = 0; j < last_step; ++j) {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const ModeTransition& tr = transitions[modes[i].tr_index];
            const cplx db = noise.increment(modes[i].n1, modes[i].n2, j);
            auto& st = states[i];
            const cplx p = st.pos, v = st.vel;
            st.pos = tr.a11 * p + tr.a12 * v + tr.b1 * db;
            st.vel = tr.a21 * p + tr.a22 * v + tr.b2 * db;
            st.clock += noise.dt;
        }
        if (next_out < out_step.size() && out_step[next_out] == j + 1) {
            emit();
            ++next_out;
        }
    }
    return path;
}

std::vector<SpectralField> convolution_difference(const ConvolutionPath& pkg,
                                                  const ConvolutionPath& pwave) {
    if (pkg.times != pwave.times || pkg.N != pwave.N)
        throw std::invalid_argument("convolution_difference: mismatched grids");
    std::vector<SpectralField> out;
    out.reserve(pkg.times.size());
    for (std::size_t i = 0; i < pkg.times.size(); ++i) {
        SpectralField a = pkg.truncated(i);
        const SpectralField b = pwave.truncated(i);
        for (std::size_t k = 0; k < a.coeffs.size(); ++k) a.coeffs[k] -= b.coeffs[k];
        out.push_back(std::move(a));
    }
    return out;
}

SnapshotSampler::SnapshotSampler(const FrequencyLattice& lat, ConvKind kind, double N,
                                 std::vector<double> times)
    : lat_(lat), kind_(kind), N_(N), times_(std::move(times)) {
    for (std::size_t i = 0; i + 1 < times_.size(); ++i)
        if (times_[i + 1] <= times_[i])
            throw std::invalid_argument("SnapshotSampler: times must be increasing");
    if (lat_.N_cutoff < N) throw std::invalid_argument("SnapshotSampler: lattice does not resolve N");
    const int nmax = static_cast<int>(std::ceil(N));
    std::unordered_map<long long, int> tr_index_of;
    const std::size_t ntimes = times_.size();
    for (int n1 = 0; n1 <= nmax; ++n1)
        for (int n2 = (n1 == 0 ? 0 : -nmax); n2 <= nmax; ++n2) {
            const long long r2 = static_cast<long long>(n1) * n1 + static_cast<long long>(n2) * n2;
            const double r = std::sqrt(static_cast<double>(r2));
            const double chi = bump::chi_cutoff(r, N);
            if (chi == 0.0) continue;
            auto it = tr_index_of.find(r2);
            if (it == tr_index_of.end()) {
                const double w =
                    kind == ConvKind::kg ? std::sqrt(0.75 + static_cast<double>(r2)) : r;
                double prev = 0.0;
                for (double t : times_) {
                    transitions_.push_back(mode_transition(w, t - prev));
                    prev = t;
                }
                it = tr_index_of
                         .emplace(r2, static_cast<int>(transitions_.size() / ntimes) - 1)
                         .first;
            }
            modes_.push_back({n1, n2, chi, 1.0 / jbracket(n1, n2), it->second,
                              n1 == 0 && n2 == 0});
        }
}

void SnapshotSampler::set_points(const std::vector<std::array<double, 2>>& points) {
    points_ = points;
    phases_.assign(modes_.size() * points_.size(), cplx{});
    for (std::size_t m = 0; m < modes_.size(); ++m)
        for (std::size_t p = 0; p < points_.size(); ++p) {
            const double ph = modes_[m].n1 * points_[p][0] + modes_[m].n2 * points_[p][1];
            phases_[m * points_.size() + p] = std::exp(cplx(0.0, ph));
        }
}

std::vector<SpectralField> SnapshotSampler::sample(std::uint64_t seed) const {
    std::vector<SpectralField> out(times_.size(), SpectralField(lat_, true));
    const std::size_t ntimes = times_.size();
    for (const auto& md : modes_) {
        RngStream rng(seed ^ kTagSnapshot, mode_stream(md.n1, md.n2));
        cplx pos, vel;
        if (md.zero) {
            pos = rng.normal() * md.inv_jb;
            vel = rng.normal();
        } else {
            pos = rng.cnormal(1.0) * md.inv_jb;
            vel = rng.cnormal(1.0);
        }
        for (std::size_t k = 0; k < ntimes; ++k) {
            const auto& tr = transitions_[static_cast<std::size_t>(md.tr_index) * ntimes + k];
            cplx xi1, xi2;
            if (md.zero) {
                xi1 = rng.normal();
                xi2 = rng.normal();
            } else {
                xi1 = rng.cnormal(1.0);
                xi2 = rng.cnormal(1.0);
            }
            const cplx p = pos, v = vel;
            pos = tr.a11 * p + tr.a12 * v + tr.l11 * xi1;
            vel = tr.a21 * p + tr.a22 * v + tr.l21 * xi1 + tr.l22 * xi2;
            out[k].at(md.n1, md.n2) = pos;
            if (!md.zero) out[k].at(-md.n1, -md.n2) = std::conj(pos);
        }
    }
    return out;
}

void SnapshotSampler::sample_points(std::uint64_t seed, std::vector<double>& out) const {
    const std::size_t ntimes = times_.size();
    const std::size_t npts = points_.size();
    out.assign(ntimes * npts, 0.0);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const auto& md = modes_[m];
        RngStream rng(seed ^ kTagSnapshot, mode_stream(md.n1, md.n2));
        cplx pos, vel;
        if (md.zero) {
            pos = rng.normal() * md.inv_jb;
            vel = rng.normal();
        } else {
            pos = rng.cnormal(1.0) * md.inv_jb;
            vel = rng.cnormal(1.0);
        }
        const double mult = md.zero ? 1.0 : 2.0;
        for (std::size_t k = 0; k < ntimes; ++k) {
            const auto& tr = transitions_[static_cast<std::size_t>(md.tr_index) * ntimes + k];
            cplx xi1, xi2;
            if (md.zero) {
                xi1 = rng.normal();
                xi2 = rng.normal();
            } else {
                xi1 = rng.cnormal(1.0);
                xi2 = rng.cnormal(1.0);
            }
            const cplx p = pos, v = vel;
            pos = tr.a11 * p + tr.a12 * v + tr.l11 * xi1;
            vel = tr.a21 * p + tr.a22 * v + tr.l21 * xi1 + tr.l22 * xi2;
            const cplx weighted = pos * md.chi;
            for (std::size_t pidx = 0; pidx < npts; ++pidx)
                out[k * npts + pidx] +=
                    mult * (weighted * phases_[m * npts + pidx]).real() / two_pi;
        }
    }
}

std::vector<SpectralField> sample_convolution_snapshots(const FrequencyLattice& lat,
                                                        std::uint64_t seed, ConvKind kind, double N,
                                                        const std::vector<double>& times) {
    return SnapshotSampler(lat, kind, N, times).sample(seed);
}

double mode_covariance(double w, double hn2, double t1, double t2) {
    if (t1 < t2) std::swap(t1, t2);
    const double d1 = std::exp(-0.5 * t1), d2 = std::exp(-0.5 * t2);
    const double s1 = sinc_freq(w, t1), s2 = sinc_freq(w, t2);
    const double amp1 = d1 * (std::cos(w * t1) + 0.5 * s1);
    const double amp2 = d2 * (std::cos(w * t2) + 0.5 * s2);
    const double init = amp1 * amp2 / hn2 + (d1 * s1) * (d2 * s2);

    // Noise part: 2 e^{-(t1+t2)/2} int_0^t2 e^s sin((t1-s)w) sin((t2-s)w) / w^2 ds
    double ito;
    if (w < 1e-3) {
        static const double gx[8] = {0.01985507175123188, 0.10166676129318664,
                                     0.2372337950418355,  0.4082826787521751,
                                     0.5917173212478249,  0.7627662049581645,
                                     0.8983332387068134,  0.9801449282487682};
        static const double gw[8] = {0.05061426814518813, 0.11119051722668724,
                                     0.15685332293894364, 0.18134189168918097,
                                     0.18134189168918097, 0.15685332293894364,
                                     0.11119051722668724, 0.05061426814518813};
        double acc = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double s = t2 * gx[i];
            acc += gw[i] * std::exp(s) * sinc_freq(w, t1 - s) * sinc_freq(w, t2 - s);
        }
        ito = 2.0 * d1 * d2 * t2 * acc;
    } else {
        const double dt12 = t1 - t2;
        const cplx mu(1.0, -2.0 * w);
        const cplx zz = std::exp(cplx(0.0, (t1 + t2) * w)) * (std::exp(t2 * mu) - 1.0) / mu;
        const double val = std::cos(dt12 * w) * (std::exp(t2) - 1.0) - zz.real();
        ito = d1 * d2 * val / (w * w);
    }
    return init + ito;
}

namespace {

std::vector<double> mode_cov_table(int nmax, ConvKind kind, double t1, double t2) {
    std::vector<double> table(static_cast<std::size_t>(nmax) * nmax + 1,
                              std::numeric_limits<double>::quiet_NaN());
    for (int r2 = 0; r2 <= nmax * nmax; ++r2) {
        const double w =
            kind == ConvKind::kg ? std::sqrt(0.75 + r2) : std::sqrt(static_cast<double>(r2));
        table[r2] = mode_covariance(w, 1.0 + r2, t1, t2);
    }
    return table;
}

} // namespace

RealField2D covariance_gamma_grid(const FrequencyLattice& lat, double N, double t1, double t2,
                                  ConvKind kind) {
    const int nmax = static_cast<int>(std::ceil(N));
    const auto table = mode_cov_table(nmax, kind, t1, t2);
    SpectralField f(lat, true);
    for (int n1 = -nmax; n1 <= nmax; ++n1)
        for (int n2 = -nmax; n2 <= nmax; ++n2) {
            const int r2 = n1 * n1 + n2 * n2;
            if (r2 > nmax * nmax) continue;
            const double chi = bump::chi_cutoff(std::sqrt(static_cast<double>(r2)), N);
            if (chi == 0.0) continue;
            f.at(n1, n2) = chi * chi * table[r2] / two_pi;
        }
    // Gamma(x) = (2 pi)^{-2} sum chi^2 K_n e^{i n x}; inverse_transform carries
    // one 1/(2 pi), the coefficients above the other.
    return inverse_transform(f);
}

double covariance_gamma(const FrequencyLattice& lat, double N, double t1, double t2,
                        const std::array<double, 2>& x, CovMode mode, std::uint64_t seed,
                        int samples) {
    if (t1 < 0.0 || t2 < 0.0) throw std::invalid_argument("covariance_gamma: negative time");
    if (mode == CovMode::analytic_sum) {
        const int nmax = static_cast<int>(std::ceil(N));
        const auto table = mode_cov_table(nmax, ConvKind::wave, t1, t2);
        double acc = 0.0;
        for (int n1 = -nmax; n1 <= nmax; ++n1)
            for (int n2 = -nmax; n2 <= nmax; ++n2) {
                const int r2 = n1 * n1 + n2 * n2;
                if (r2 > nmax * nmax) continue;
                const double chi = bump::chi_cutoff(std::sqrt(static_cast<double>(r2)), N);
                if (chi == 0.0) continue;
                acc += chi * chi * table[r2] * std::cos(n1 * x[0] + n2 * x[1]);
            }
        return acc / (two_pi * two_pi);
    }

    if (samples <= 0) samples = 10000;
    std::vector<double> times;
    std::vector<std::array<double, 2>> pts;
    if (t1 == t2) {
        times = {t1};
        pts = {x, {0.0, 0.0}};
    } else if (t1 < t2) {
        times = {t1, t2};
        pts = {x, {0.0, 0.0}};
    } else {
        times = {t2, t1};
        pts = {{0.0, 0.0}, x};
    }
    SnapshotSampler sampler(lat, ConvKind::wave, N, times);
    sampler.set_points(pts);
    double acc = 0.0;
    std::vector<double> vals;
    for (int s = 0; s < samples; ++s) {
        sampler.sample_points(splitmix64(seed + static_cast<std::uint64_t>(s)), vals);
        const double a = (times.size() == 1) ? vals[0] : vals[0 * 2 + 0];
        const double b = (times.size() == 1) ? vals[1] : vals[1 * 2 + 1];
        acc += a * b;
    }
    return acc / samples;
}

} // namespace hsg
