#pragma once

#include "hsg/chaos.hpp"
#include "hsg/convolution.hpp"

#include <string>
#include <vector>

namespace hsg {

// Position/velocity state of the truncated renormalized flow.
struct FlowState {
    SpectralField u;
    SpectralField ut;
    double t = 0.0;
    RenormConstants rc;
};

enum class FlowNoise { off, path_left_point, exact_transition };

struct FlowConfig {
    RenormConstants rc;
    double gamma = 1.0; // nonlinearity coupling (0 = linear flow)
    double beta = 1.0;
    double dt = 1e-3;
    bool damping = true;
    FlowNoise noise = FlowNoise::exact_transition;
    NoisePath path;             // used by path_left_point
    std::uint64_t noise_seed = 0; // used by exact_transition
};

// Symmetric splitting integrator: half nonlinear kick, exact linear (damped)
// drift with the per-step noise increment, half kick.  The linear part and
// its noise are exact per mode; the nonlinearity is sampled at step
// endpoints, evaluated by collocation on the oversampled grid and projected.
class FlowIntegrator {
public:
    FlowIntegrator(const FrequencyLattice& lat, const FlowConfig& cfg);

    // dt_max(N) = min(1/(8N), 5e-3)
    static double dt_max(double N);

    // Advances `state` by n steps; `first_step` indexes the noise draws.
    void run(FlowState& state, int n_steps, int first_step = 0) const;

    const FlowConfig& config() const { return cfg_; }

private:
    void kick(FlowState& state, double weight) const;
    void drift(FlowState& state, int step_index) const;

    FrequencyLattice lat_;
    FlowConfig cfg_;
    std::vector<ModeTransition> transitions_; // per distinct |n|^2
    std::vector<int> tr_index_;               // per (k1,k2) grid slot
};

// Truncated Hamiltonian with the renormalized cosine interaction (the
// conserved energy of the undamped, noiseless flow).
double flow_energy(const FlowState& state, double gamma, double beta);

struct WeightedEnsemble {
    std::vector<FlowState> states;
    std::vector<double> log_weights;
    double ess = 0.0;
    bool degenerate = false; // ESS below 5% of the sample count
};

WeightedEnsemble sample_gibbs_ensemble(const FrequencyLattice& lat, const RenormConstants& rc,
                                       double gamma, double beta, int count, std::uint64_t seed);

// Pre-registered invariance observables evaluated on a state.
std::vector<double> invariance_observables(const FlowState& state, double beta);
std::vector<std::string> invariance_observable_names();

struct InvarianceReport {
    std::vector<std::string> names;
    std::vector<double> mean_before;
    std::vector<double> mean_after;
    std::vector<double> z_scores; // weighted paired z
    double ess = 0.0;
    bool pass = false; // all |z| <= 3
};

// Evolves every ensemble member to time T with independent noise and
// compares weighted observable statistics at t = 0 and t = T.
InvarianceReport invariance_experiment(const WeightedEnsemble& ensemble, double T, double dt,
                                       double gamma, double beta, std::uint64_t noise_seed,
                                       int threads = 0);

struct PicardResult {
    std::vector<SpectralField> v; // remainder on the slice grid
    std::vector<double> diff_norms;
    bool diverged = false;
};

// Fixed-point iteration for the remainder equation driven by the chaos and
// the convolution difference, using the causal massive-kernel quadrature.
PicardResult solve_remainder_picard(const std::vector<RealField2D>& psi_diff,
                                    const ChaosSample& theta, double gamma, int iterations);

} // namespace hsg
