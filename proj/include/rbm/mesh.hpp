#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rbm/pca.hpp"
#include "rbm/rate.hpp"
#include "rbm/rng.hpp"

namespace rbm {

// Energy of a configuration as a function of its magnetizations only
// (everything except the entropic prior).  `longitudinal` sees m_1..m_d,
// `bias` sees m_0; the two directions factorize by construction.
class ProjectedEnergy {
public:
    virtual ~ProjectedEnergy() = default;
    virtual double longitudinal(const Vec& m) const = 0;
    virtual double bias(double m0) const = 0;
};

struct ZeroProjectedEnergy final : ProjectedEnergy {
    double longitudinal(const Vec&) const override { return 0.0; }
    double bias(double) const override { return 0.0; }
};

struct MeshAxis {
    double lo = 0.0, hi = 0.0;
    int bins = 0;
    double width() const { return (hi - lo) / bins; }
    double center(int b) const { return lo + (b + 0.5) * width(); }
    int locate(double x) const;  // -1 when outside
};

// One discretized density: log-density per cell (normalized so the feasible
// mass sums to 1), cached mu*(m) per cell, and a cumulative table for
// inverse-transform sampling.
struct MeshGrid {
    std::vector<MeshAxis> axes;
    Vec log_density;
    std::vector<Vec> mu;
    std::vector<std::uint8_t> feasible;
    Vec cum;
    double log_mass = 0.0;  // log of the unnormalized total mass

    std::size_t ncells() const;
    std::vector<int> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::vector<int>& b) const;
    Vec center_of(std::size_t idx) const;
    std::size_t locate(const Vec& m) const;  // npos when outside/infeasible
    static constexpr std::size_t npos = std::size_t(-1);
};

struct MagnetizationMesh {
    MeshGrid main;  // m_1..m_d over pca.u
    MeshGrid bias;  // m_0 over pca.u0
    int nv = 0;

    // log of the model partition function implied by the mesh:
    //   Z ~= 2^Nv * mass(main) * mass(bias)
    double log_partition_estimate() const;
};

struct MeshOptions {
    int bins_per_dim = 101;
    int bias_bins = 101;
    // explicit per-dimension ranges for the main grid; data-independent
    // polytope ranges are used when empty
    std::vector<std::pair<double, double>> ranges;
    std::pair<double, double> bias_range{0.0, 0.0};  // lo==hi means automatic
    std::size_t memory_cap_bytes = std::size_t(2) << 30;
};

// Ranges covering the projected data with a margin, clipped to the
// achievable polytope; always include the origin.
std::vector<std::pair<double, double>> default_mesh_ranges(const PcaBasis& pca,
                                                           const Mat& projected,
                                                           double margin_frac = 0.25);
std::pair<double, double> default_bias_range(const PcaBasis& pca, const Vec& projected0,
                                             double margin_frac = 0.25);

// Tabulates log p(m) = -Nv I(m) - H(m) + const on the grid, normalized over
// the feasible cells.  Cells whose mu* solve fails are excluded from the
// support.  Refuses (with the computed requirement) if the table would
// exceed the memory cap.
MagnetizationMesh build_mesh(const PcaBasis& pca, const ProjectedEnergy& energy,
                             const MeshOptions& opt);

// Inverse-transform draw of a cell, uniform jitter within it, exact joint
// mu* solve, then independent spins through p(v_i = +1 | m) =
// sigmoid(2 sqrt(Nv) sum_a u_{a,i} mu*_a).  Returns +-1 rows.
std::vector<State> static_sample(const MagnetizationMesh& mesh, const PcaBasis& pca,
                                 int count, RngStream& rng);

// Single draw, also reporting the target magnetizations (m_0, m_1..m_d).
State static_sample_one(const MagnetizationMesh& mesh, const PcaBasis& pca, RngStream& rng,
                        Vec* target_m = nullptr);

}  // namespace rbm
