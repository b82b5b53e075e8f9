#pragma once

#include <string>

#include "rbm/mesh.hpp"
#include "rbm/model.hpp"
#include "rbm/pca.hpp"

namespace rbm {

// Low-rank surrogate trained convexly in magnetization space.  A hyperplane
// (n_a, z_a) with weight q_a contributes sqrt(Nv) q_a |n_a.m + z_a| to the
// log density; mapped back to an RBM it becomes hidden unit a with input
// sqrt(Nv) q_a (n_a.m(v) + z_a).
struct RcmModel {
    PcaBasis pca;
    Mat normals;   // K x d unit rows
    Vec offsets;   // z_a
    Vec qweights;  // q_a >= 0
    Vec theta;     // theta_0..theta_d (index 0 = bias direction)
    bool converged = false;

    int planes() const { return normals.rows; }
    int d() const { return pca.d(); }
    void validate() const;
};

// The RCM's own projected energy (|.| form of log cosh).
class RcmEnergy final : public ProjectedEnergy {
public:
    explicit RcmEnergy(const RcmModel& m) : m_(m) {}
    double longitudinal(const Vec& m) const override;
    double bias(double m0) const override;

private:
    const RcmModel& m_;
};

// Projected energy of an RBM whose weight rows lie in the span of the PCA
// directions (e.g. a lifted RCM); uses the exact log 2cosh form.
class LowRankRbmEnergy final : public ProjectedEnergy {
public:
    LowRankRbmEnergy(const RbmModel& model, const PcaBasis& pca, double span_tol = 1e-8);
    double longitudinal(const Vec& m) const override;
    double bias(double m0) const override;

private:
    Mat wproj_;  // Nh x d
    Vec hbias_;
    Vec theta_;  // theta_0..theta_d
    int nv_;
};

// Family of hyperplanes covering the projected data: per direction (from a
// low-discrepancy set on the half-sphere), offsets on a uniform grid over
// the data span plus a margin.
struct HyperplaneFamily {
    Mat normals;  // K x d
    Vec offsets;
};
HyperplaneFamily make_hyperplane_family(const Mat& projected_data, int budget,
                                        double margin_frac = 0.25);

struct RcmTrainOptions {
    int hyperplane_budget = 500;
    int bins_per_dim = 101;
    int bias_bins = 101;
    double learning_rate = 1.0;  // unused by the Newton path; kept for the CLI surface
    int max_iterations = 5000;
    double gradient_tol = 1e-4;      // max |moment gap| at convergence
    double prune_fraction = 1e-3;    // drop planes with q below this times max q
    double q_init = 0.01;
};

RcmModel rcm_train(const BinaryDataset& data, const PcaBasis& pca, const RcmTrainOptions& opt,
                   Vec* objective_trace = nullptr);

// Mesh of the RCM's own density (used during training and for its sampler).
MagnetizationMesh build_rcm_mesh(const RcmModel& m, const Mat& projected_data,
                                 const Vec& projected_bias, int bins_per_dim, int bias_bins);

// Lift to a full RBM (+-1 convention).  Surviving hyperplanes must fit in
// nh_target; remaining hidden units are zero (plus optional noise).
RbmModel rcm_to_rbm(const RcmModel& m, int nh_target, double noise_scale = 0.0,
                    std::uint64_t noise_seed = 0);

// Project a low-rank RBM back onto RCM parameters (exact when the weight
// rows lie in the PCA span).
RcmModel project_rbm_to_rcm(const RbmModel& model, const PcaBasis& pca);

// "RCM1" file format; the mesh is recomputed on load, never stored.
void save_rcm(const RcmModel& m, const std::string& path);
RcmModel load_rcm(const std::string& path);

}  // namespace rbm
