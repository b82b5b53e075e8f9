#include "rbm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rbm/chain.hpp"
#include "rbm/exact.hpp"

namespace rbm {

int MeshAxis::locate(double x) const {
    if (x < lo || x >= hi) return -1;
    int b = int((x - lo) / width());
    if (b >= bins) b = bins - 1;
    return b;
}

std::size_t MeshGrid::ncells() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= std::size_t(a.bins);
    return n;
}

std::vector<int> MeshGrid::unflatten(std::size_t idx) const {
    std::vector<int> b(axes.size());
    for (int k = int(axes.size()) - 1; k >= 0; --k) {
        b[std::size_t(k)] = int(idx % std::size_t(axes[std::size_t(k)].bins));
        idx /= std::size_t(axes[std::size_t(k)].bins);
    }
    return b;
}

std::size_t MeshGrid::flatten(const std::vector<int>& b) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < axes.size(); ++k)
        idx = idx * std::size_t(axes[k].bins) + std::size_t(b[k]);
    return idx;
}

Vec MeshGrid::center_of(std::size_t idx) const {
    const auto b = unflatten(idx);
    Vec m(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) m[k] = axes[k].center(b[k]);
    return m;
}

std::size_t MeshGrid::locate(const Vec& m) const {
    std::vector<int> b(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const int bk = axes[k].locate(m[k]);
        if (bk < 0) return npos;
        b[k] = bk;
    }
    const std::size_t idx = flatten(b);
    return feasible[idx] ? idx : npos;
}

double MagnetizationMesh::log_partition_estimate() const {
    return nv * std::log(2.0) + main.log_mass + bias.log_mass;
}

namespace {

double polytope_max(const Mat& basis, int row) {
    double s = 0.0;
    for (int i = 0; i < basis.cols; ++i) s += std::abs(basis(row, i));
    return s / std::sqrt(double(basis.cols));
}

constexpr double kBoundaryInset = 1e-6;

void finalize_grid(MeshGrid& g) {
    Vec finite;
    finite.reserve(g.log_density.size());
    for (std::size_t i = 0; i < g.log_density.size(); ++i)
        if (g.feasible[i]) finite.push_back(g.log_density[i]);
    if (finite.empty()) throw std::runtime_error("build_mesh: no feasible cells");
    g.log_mass = logsumexp(finite);
    g.cum.assign(g.log_density.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.log_density.size(); ++i) {
        if (g.feasible[i]) {
            g.log_density[i] -= g.log_mass;
            acc += std::exp(g.log_density[i]);
        } else {
            g.log_density[i] = -std::numeric_limits<double>::infinity();
        }
        g.cum[i] = acc;
    }
    g.cum.back() = 1.0;
}

// Fills the density and mu caches of one grid over the given basis rows.
// First-axis slabs run in parallel; within a slab the sweep is serial so each
// Newton solve warm-starts from its neighbour.
void tabulate(MeshGrid& g, const Mat& basis, int nv,
              const std::function<double(const Vec&)>& energy) {
    const std::size_t n = g.ncells();
    g.log_density.assign(n, 0.0);
    g.mu.assign(n, Vec());
    g.feasible.assign(n, 0);

    const int slab = g.axes[0].bins;
    const std::size_t per = n / std::size_t(slab);
    parallel_for(slab, [&](int s) {
        Vec warm(std::size_t(basis.rows), 0.0);
        bool have_warm = false;
        for (std::size_t j = 0; j < per; ++j) {
            const std::size_t idx = std::size_t(s) * per + j;
            const Vec m = g.center_of(idx);
            MuStarResult r = solve_mu_star(basis, m, have_warm ? &warm : nullptr);
            if (!r.converged) r = solve_mu_star(basis, m, nullptr);
            if (!r.converged) {
                g.feasible[idx] = 0;
                have_warm = false;
                continue;
            }
            warm = r.mu;
            have_warm = true;
            const double rate = dot(m, r.mu) - phi(basis, r.mu);
            g.log_density[idx] = -double(nv) * rate - energy(m);
            g.mu[idx] = r.mu;
            g.feasible[idx] = 1;
        }
    });
    finalize_grid(g);
}

}  // namespace

std::vector<std::pair<double, double>> default_mesh_ranges(const PcaBasis& pca,
                                                           const Mat& projected,
                                                           double margin_frac) {
    std::vector<std::pair<double, double>> out;
    for (int k = 0; k < pca.d(); ++k) {
        double lo = 1e300, hi = -1e300;
        for (int r = 0; r < projected.rows; ++r) {
            lo = std::min(lo, projected(r, k));
            hi = std::max(hi, projected(r, k));
        }
        const double margin = std::max(margin_frac * (hi - lo), 0.1);
        lo = std::min(lo - margin, -0.02);
        hi = std::max(hi + margin, 0.02);
        const double cap = polytope_max(pca.u, k) - kBoundaryInset;
        out.emplace_back(std::max(lo, -cap), std::min(hi, cap));
    }
    return out;
}

std::pair<double, double> default_bias_range(const PcaBasis& pca, const Vec& projected0,
                                             double margin_frac) {
    double lo = 1e300, hi = -1e300;
    for (double x : projected0) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double margin = std::max(margin_frac * (hi - lo), 0.1);
    lo = std::min(lo - margin, -0.02);
    hi = std::max(hi + margin, 0.02);
    Mat b0(1, pca.nv());
    for (int i = 0; i < pca.nv(); ++i) b0(0, i) = pca.u0[i];
    const double cap = polytope_max(b0, 0) - kBoundaryInset;
    return {std::max(lo, -cap), std::min(hi, cap)};
}

MagnetizationMesh build_mesh(const PcaBasis& pca, const ProjectedEnergy& energy,
                             const MeshOptions& opt) {
    const int d = pca.d();
    if (d > 4) throw std::invalid_argument("build_mesh: d must be <= 4");

    MagnetizationMesh mesh;
    mesh.nv = pca.nv();

    std::vector<std::pair<double, double>> ranges = opt.ranges;
    if (ranges.empty()) {
        ranges.resize(std::size_t(d));
        for (int k = 0; k < d; ++k) {
            const double cap = polytope_max(pca.u, k) - kBoundaryInset;
            ranges[std::size_t(k)] = {-cap, cap};
        }
    }
    if (int(ranges.size()) != d) throw std::invalid_argument("build_mesh: ranges/d mismatch");

    std::size_t ncells = 1;
    for (int k = 0; k < d; ++k) ncells *= std::size_t(opt.bins_per_dim);
    const std::size_t bytes =
        ncells * (2 * sizeof(double) + 1 + std::size_t(d) * sizeof(double) + sizeof(Vec)) +
        std::size_t(opt.bias_bins) * 4 * sizeof(double);
    if (bytes > opt.memory_cap_bytes)
        throw std::runtime_error("build_mesh: estimated " + std::to_string(bytes) +
                                 " bytes exceeds the cap of " +
                                 std::to_string(opt.memory_cap_bytes) + " bytes");

    mesh.main.axes.resize(std::size_t(d));
    for (int k = 0; k < d; ++k) {
        auto [lo, hi] = ranges[std::size_t(k)];
        const double cap = polytope_max(pca.u, k) - kBoundaryInset;
        lo = std::max(lo, -cap);
        hi = std::min(hi, cap);
        if (!(lo < hi)) throw std::invalid_argument("build_mesh: empty range");
        mesh.main.axes[std::size_t(k)] = {lo, hi, opt.bins_per_dim};
    }
    tabulate(mesh.main, pca.u, mesh.nv, [&](const Vec& m) { return energy.longitudinal(m); });

    Mat b0(1, pca.nv());
    for (int i = 0; i < pca.nv(); ++i) b0(0, i) = pca.u0[i];
    auto br = opt.bias_range;
    if (!(br.first < br.second)) {
        const double cap = polytope_max(b0, 0) - kBoundaryInset;
        br = {-cap, cap};
    }
    mesh.bias.axes = {MeshAxis{br.first, br.second, opt.bias_bins}};
    tabulate(mesh.bias, b0, mesh.nv, [&](const Vec& m) { return energy.bias(m[0]); });

    return mesh;
}

namespace {

std::size_t draw_cell(const MeshGrid& g, RngStream& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double u = rng.u01();
        std::size_t idx =
            std::size_t(std::lower_bound(g.cum.begin(), g.cum.end(), u) - g.cum.begin());
        if (idx >= g.cum.size()) idx = g.cum.size() - 1;
        if (g.feasible[idx]) return idx;
    }
    throw std::runtime_error("static_sample: could not draw a feasible cell");
}

}  // namespace

State static_sample_one(const MagnetizationMesh& mesh, const PcaBasis& pca, RngStream& rng,
                        Vec* target_m) {
    const int d = pca.d(), nv = pca.nv();
    const Mat full = pca.full_basis();

    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::size_t ci = draw_cell(mesh.main, rng);
        const std::size_t bi = draw_cell(mesh.bias, rng);
        const auto cb = mesh.main.unflatten(ci);

        Vec m(std::size_t(d) + 1, 0.0);
        m[0] = mesh.bias.axes[0].center(int(bi)) + (rng.u01() - 0.5) * mesh.bias.axes[0].width();
        for (int k = 0; k < d; ++k)
            m[std::size_t(k) + 1] = mesh.main.axes[std::size_t(k)].center(cb[std::size_t(k)]) +
                                    (rng.u01() - 0.5) * mesh.main.axes[std::size_t(k)].width();

        Vec warm(std::size_t(d) + 1, 0.0);
        warm[0] = mesh.bias.mu[bi][0];
        for (int k = 0; k < d; ++k) warm[std::size_t(k) + 1] = mesh.main.mu[ci][std::size_t(k)];

        MuStarResult r = solve_mu_star(full, m, &warm);
        if (!r.converged) continue;  // jointly infeasible corner; redraw

        const double root = std::sqrt(double(nv));
        State v(std::size_t(nv), 0);
        for (int i = 0; i < nv; ++i) {
            double tilt = 0.0;
            for (int a = 0; a <= d; ++a) tilt += full(a, i) * r.mu[std::size_t(a)];
            v[std::size_t(i)] =
                rng.bernoulli(sigmoid(2.0 * root * tilt)) ? std::int8_t(1) : std::int8_t(-1);
        }
        if (target_m) *target_m = m;
        return v;
    }
    throw std::runtime_error("static_sample: repeated mu* failures (mesh near boundary?)");
}

std::vector<State> static_sample(const MagnetizationMesh& mesh, const PcaBasis& pca, int count,
                                 RngStream& rng) {
    std::vector<State> out;
    out.reserve(std::size_t(count));
    for (int s = 0; s < count; ++s) out.push_back(static_sample_one(mesh, pca, rng));
    return out;
}

}  // namespace rbm
