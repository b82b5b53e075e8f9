#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rbm/chain.hpp"
#include "rbm/mesh.hpp"
#include "rbm/model.hpp"
#include "rbm/pca.hpp"

namespace rbm {

// Metropolis exchange of full (v,h) states between adjacent models:
//   p_acc = min[1, exp(dH_t(x_t) - dH_t(x_tm1))],  dH_t(x) = H_t(x) - H_tm1(x)
bool swap_attempt(const RbmModel& model_t, const RbmModel& model_tm1, Configuration& x_t,
                  Configuration& x_tm1, RngStream& rng);

// Static sampler serving ladder index 0 when the trajectory starts from a
// pretrained low-rank model.
struct RcmHead {
    const MagnetizationMesh* mesh = nullptr;
    const PcaBasis* pca = nullptr;
};

struct LadderRunOptions {
    int chain_count = 100;
    int sweeps = 1000;
    int gibbs_steps = 1;      // k AGS steps per model per sweep
    int sample_stride = 10;   // target samples kept every this many sweeps
    int init_gibbs_steps = 1; // k~ used while cascading the initial states
    bool record_history = true;
    bool collect_all_models = false;  // keep (v,h) samples at every ladder rung
    std::uint64_t seed = 0;
};

struct LadderRunResult {
    std::vector<State> target_samples;                    // visible states, last model
    std::vector<std::vector<Configuration>> rung_samples; // per model (when collected)
    Vec pair_acceptance;      // measured swap rate per adjacent pair
    std::vector<long> pair_attempts;
    // visit_history[g][r] = model index of replica r of start-group g per
    // sweep; replicas are grouped by their starting model index
    std::vector<std::vector<std::vector<std::int16_t>>> visit_history;
};

// Parallel Trajectory Tempering over an ordered model ladder (index 0 =
// easiest).  Chains cascade through the ladder at initialization; when an
// RCM head is given, rung 0 is refreshed with a fresh static sample every
// sweep.  One sweep = k AGS steps per model, then one swap attempt per
// adjacent pair, low to high.
LadderRunResult ptt_run(const std::vector<RbmModel>& ladder, const LadderRunOptions& opt,
                        std::optional<RcmHead> head = {});

// Standard Parallel Tempering: same sweep structure over beta-scaled copies
// of one model.  Betas must be ascending and end at 1.  The optional
// reference model (independent sites) replaces plain beta-scaling of the
// biases per the interpolation p_i ~ p_ref^(1-beta_i) exp(-beta_i H).
LadderRunResult pt_run(const RbmModel& model, const Vec& betas, const LadderRunOptions& opt,
                       const RbmModel* reference = nullptr);

std::vector<RbmModel> tempered_ladder(const RbmModel& model, const Vec& betas,
                                      const RbmModel* reference = nullptr);

struct LadderSelection {
    std::vector<int> indices;          // into the full trajectory
    Vec measured_acceptance;           // per kept adjacent pair
    bool all_pairs_reached_target = true;
};

// Greedy forward scan keeping the minimal subsequence whose estimated
// adjacent exchange acceptance stays above the target; probes are drawn from the
// earlier model by AGS burn-in (or statically for an RCM head).  First and
// last checkpoints are always kept.
LadderSelection select_ladder(const std::vector<RbmModel>& trajectory, double target_acceptance,
                              int probe_samples, int probe_burnin, std::uint64_t seed,
                              std::optional<RcmHead> head = {});

struct AutocorrelationResult {
    Vec c;            // C(t), averaged over start groups
    Vec c_err;        // standard error over start groups
    double tau_exp = 0.0, tau_exp_err = 0.0;
    double tau_int = 0.0, tau_int_err = 0.0;
    int fit_lo = 0, fit_hi = 0;  // window used for the tau_exp fit
    bool thermalized = true;     // run length >= 20 tau_exp
};

// Random-walk diagnostics of the model indices visited by each replica:
//   C(t) = <(n(t0+t) - nbar)(n(t0) - nbar)> / <(n(t0) - nbar)^2>
// with nbar = (N_m - 1)/2 fixed.  tau_int solves
//   tau = 1/2 + sum_{t=1..6 tau} C(t)
// self-consistently; tau_exp comes from a log-linear fit over the window
// where C is in [0.05, 0.5].  Errors are start-group spreads.
AutocorrelationResult index_autocorrelation(
    const std::vector<std::vector<std::vector<std::int16_t>>>& histories, int ladder_size);

}  // namespace rbm
