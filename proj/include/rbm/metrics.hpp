#pragma once

#include <array>
#include <vector>

#include "rbm/model.hpp"
#include "rbm/pca.hpp"

namespace rbm {

// Jump-counting boundary in a 2-D projection plane.
struct Separator {
    std::array<double, 2> normal{1.0, 0.0};  // unit
    double offset = 0.0;

    double signed_distance(double x, double y) const {
        return normal[0] * x + normal[1] * y - offset;
    }
};

// Line through the projected data mean, perpendicular to PC1, in the
// PC1-PC2 plane.
Separator default_separator(const PcaBasis& pca, const std::vector<State>& data_pm);

struct JumpReport {
    std::vector<long> per_chain;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

// Sign changes of the signed distance along each chain's projected history.
JumpReport mode_jumps(const std::vector<std::vector<std::array<double, 2>>>& projections,
                      const Separator& sep);

enum class Metric { Hamming, Euclidean };

struct AatsResult {
    double aa_truth = 0.0;
    double aa_synth = 0.0;
    double aa_ts = 0.0;
};

// Nearest-neighbour adversarial accuracy: a real point scores 1 when its
// nearest real neighbour (self excluded) is closer than its nearest
// synthetic one, 1/2 on ties; symmetric for the synthetic side; aa_ts is
// their mean.
AatsResult aats(const std::vector<State>& real_set, const std::vector<State>& synth_set,
                Metric metric = Metric::Hamming);

// AA_TS(test, synth) - AA_TS(train, synth); all sets trimmed to the common
// size.
double privacy_loss(const std::vector<State>& real_train, const std::vector<State>& real_test,
                    const std::vector<State>& synth, Metric metric = Metric::Hamming);

struct MomentReport {
    Vec site_mean_error;       // per visible unit
    double max_mean_error = 0.0;
    double mean_abs_error = 0.0;
    double covariance_spectral_error = 0.0;  // top-d projected block
    double projected_tv = 0.0;               // 2-D histogram at fixed binning
    int tv_bins = 0;
};

MomentReport moment_report(const std::vector<State>& dataset, const std::vector<State>& samples,
                           const PcaBasis& pca, int tv_bins = 30);

}  // namespace rbm
