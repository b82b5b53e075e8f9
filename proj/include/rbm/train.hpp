#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rbm/chain.hpp"
#include "rbm/dataset.hpp"
#include "rbm/model.hpp"

namespace rbm {

enum class Reweighting { None, Jarzynski };

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 2000;
    int chain_count = 2000;
    int gibbs_steps = 100;   // k AGS alternations per parameter update
    int total_updates = 10000;
    double ladder_acceptance_target = 0.25;
    std::uint64_t seed = 0;
    Reweighting reweighting = Reweighting::None;
    double ess_threshold = 0.5;
    int eval_every = 100;  // metrics/likelihood evaluation interval, in updates

    void validate() const;

    // the full-scale defaults above shrunk for fast runs
    static TrainConfig desk_scale() {
        TrainConfig c;
        c.batch_size = 128;
        c.chain_count = 128;
        c.gibbs_steps = 10;
        return c;
    }
};

struct Gradient {
    Mat w;
    Vec vbias, hbias;
};

// Log-likelihood gradient: positive phase Rao-Blackwellized over the
// minibatch (exact conditional hidden means), negative phase over the chain
// states, weighted by the normalized chain weights when they are not all
// equal.
Gradient gradient_estimate(const RbmModel& m, const std::vector<State>& minibatch,
                           const ChainPopulation& pop);

// Both phases from exact enumeration; used for gradient checks.
Gradient exact_gradient(const RbmModel& m, const std::vector<State>& rows);

struct Checkpoint {
    int t = 0;
    RbmModel model;
    double log_z = 0.0;      // running trajectory-AIS estimate at save time
    double ll_train = 0.0;
    double ll_test = 0.0;
};

struct TrajectoryLadder {
    std::vector<Checkpoint> checkpoints;
};

struct MetricsRow {
    int t = 0;
    double log_z = 0.0, ll_train = 0.0, ll_test = 0.0, ess = 1.0;
    int checkpoint_count = 0;
};

// Importance-weight state of the online trajectory-AIS accumulation (chain
// log weights live in the population; the offset collects mass absorbed at
// resampling events).
struct TraisState {
    double log_z0 = 0.0;     // exact/analytic log Z of the initial model
    double log_z_offset = 0.0;
    double estimate(const ChainPopulation& pop) const;
};

// Adds H_next - H_prev at the current chain states (before any advance under
// model_next) to the chain weights and returns the updated running log Z.
double online_trais_update(ChainPopulation& pop, const RbmModel& model_prev,
                           const RbmModel& model_next, TraisState& state);

// Effective sample size of the weighted population.
double effective_sample_size(const ChainPopulation& pop);

// Multinomial resampling proportional to the importance weights; the
// absorbed mass folds into the running log Z and all weights reset to zero.
void resample_population(ChainPopulation& pop, TraisState& state, RngStream& rng);

// Population-annealing step: same weight update as online_trais_update, then
// resampling when the ESS drops below the threshold.
void jarzynski_step(ChainPopulation& pop, const RbmModel& model_prev,
                    const RbmModel& model_next, double ess_threshold, TraisState& state,
                    RngStream& rng);

// Mean exchange acceptance between two models estimated on the current
// chain states (chains paired cyclically).
double estimate_swap_acceptance(const RbmModel& current, const RbmModel& saved,
                                const ChainPopulation& pop);

struct TrainResult {
    TrajectoryLadder ladder;
    std::vector<MetricsRow> metrics;
    ChainPopulation population;      // gradient (PCD) chains
    ChainPopulation ais_population;  // dedicated online-AIS chains
    TraisState trais;
};

using EvalObserver = std::function<void(const MetricsRow&, const RbmModel&)>;

// PCD with persistent chains, online trajectory-AIS accumulation, and
// acceptance-monitored checkpointing.  `init_population` (e.g. RCM static
// samples) seeds the gradient chains.  The running log Z rides a dedicated
// population advanced one AGS step per update: the parameter updates are a
// function of the gradient chains, and weighing those same chains biases the
// work accumulation, so the AIS chains must stay out of the gradient.
// `init_ais_population` seeds them (independent draws of the initial law).
TrainResult pcd_train(const RbmModel& init_model, const std::vector<State>& train_rows,
                      const std::vector<State>& test_rows, const TrainConfig& config,
                      double init_log_z, std::optional<ChainPopulation> init_population = {},
                      std::optional<ChainPopulation> init_ais_population = {},
                      const EvalObserver& observer = {});

// Population with given visible states and conditionally drawn hidden
// states (chain r uses stream r of the seed, like random_init).
ChainPopulation population_from_visible(const RbmModel& m, const std::vector<State>& visible,
                                        std::uint64_t seed);

// logit/atanh visible bias from data marginals (frequencies clipped to
// [1e-4, 1-1e-4]); W and hidden biases zero.
RbmModel independent_sites_model(const std::vector<State>& rows, Convention conv);

// Trajectory directory: ladder.idx + RBM1 model files + config + metrics.
void save_trajectory(const TrainResult& result, const TrainConfig& config,
                     const std::string& dir);
TrajectoryLadder load_trajectory(const std::string& dir);

}  // namespace rbm
