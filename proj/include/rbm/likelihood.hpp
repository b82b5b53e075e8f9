#pragma once

#include <optional>
#include <vector>

#include "rbm/model.hpp"
#include "rbm/sample.hpp"

namespace rbm {

enum class ScheduleKind { TemperatureFlat, TemperatureReference, Trajectory };

// Interpolation path for annealed importance sampling.  Temperature kinds
// scale the target model by an ascending beta list (0 to 1); the trajectory
// kind walks stored checkpoints whose head partition function is known.
struct AisSchedule {
    ScheduleKind kind = ScheduleKind::TemperatureFlat;
    Vec betas;                          // temperature kinds
    std::vector<RbmModel> checkpoints;  // trajectory kind (time-ordered)
    double head_log_z = 0.0;            // trajectory kind: log Z of checkpoints[0]
    int mcmc_steps = 1;                 // AGS steps applied at each interpolation point
    int walkers = 1000;

    void validate() const;
};

struct AisResult {
    double log_z = 0.0;
    double stderr_jackknife = 0.0;
};

// Forward-path AIS: each walker starts from an exact draw of the base
// distribution and accumulates H_i(x) - H_{i-1}(x) at each hop before the
// kernel for model i is applied.  log Z = log Z_0 + log-mean-exp(-acc).
AisResult ais_estimate(const RbmModel& target, const AisSchedule& schedule, std::uint64_t seed,
                       const RbmModel* reference = nullptr,
                       std::optional<RcmHead> head = {});

struct SteppingStone {
    Vec log_z;         // per checkpoint
    Vec ll_train;      // per checkpoint (empty when no data given)
    Vec ll_test;
    bool high_variance = false;  // fewer than 100 samples at some rung
};

// Stepping-stone accumulation over PTT rung samples:
//   log(Z_t / Z_{t-1}) = log-mean-exp of -(H_t - H_{t-1}) over rung t-1.
SteppingStone ptt_log_likelihood(const std::vector<RbmModel>& ladder,
                                 const std::vector<std::vector<Configuration>>& rung_samples,
                                 double head_log_z, const std::vector<State>& train_rows,
                                 const std::vector<State>& test_rows);

// Log-likelihood of the best factorized model (clipped empirical
// frequencies).
double independent_sites_baseline(const std::vector<State>& rows, Convention conv);

}  // namespace rbm
