#include "rbm/rcm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rbm/chain.hpp"
#include "rbm/exact.hpp"
#include "rbm/rng.hpp"

namespace rbm {

void RcmModel::validate() const {
    const int k = planes(), dd = d();
    if (normals.cols != dd || int(offsets.size()) != k || int(qweights.size()) != k)
        throw std::invalid_argument("RcmModel: inconsistent hyperplane arrays");
    if (int(theta.size()) != dd + 1)
        throw std::invalid_argument("RcmModel: theta must have d+1 entries");
    for (int a = 0; a < k; ++a) {
        double n2 = 0.0;
        for (int j = 0; j < dd; ++j) n2 += normals(a, j) * normals(a, j);
        if (std::abs(n2 - 1.0) > 1e-9)
            throw std::invalid_argument("RcmModel: normal not unit length");
        if (qweights[std::size_t(a)] < 0.0)
            throw std::invalid_argument("RcmModel: negative hyperplane weight");
    }
}

double RcmEnergy::longitudinal(const Vec& m) const {
    const int dd = m_.d();
    const double root = std::sqrt(double(m_.pca.nv()));
    double e = 0.0;
    for (int k = 0; k < dd; ++k) e -= m_.pca.nv() * m_.theta[std::size_t(k) + 1] * m[std::size_t(k)];
    for (int a = 0; a < m_.planes(); ++a) {
        double s = m_.offsets[std::size_t(a)];
        for (int k = 0; k < dd; ++k) s += m_.normals(a, k) * m[std::size_t(k)];
        e -= root * m_.qweights[std::size_t(a)] * std::abs(s);
    }
    return e;
}

double RcmEnergy::bias(double m0) const { return -double(m_.pca.nv()) * m_.theta[0] * m0; }

LowRankRbmEnergy::LowRankRbmEnergy(const RbmModel& model, const PcaBasis& pca, double span_tol) {
    if (model.conv != Convention::PlusMinus)
        throw std::invalid_argument("LowRankRbmEnergy: model must be in +-1 convention");
    if (model.nv() != pca.nv()) throw std::invalid_argument("LowRankRbmEnergy: Nv mismatch");
    const int nh = model.nh(), nv = model.nv(), d = pca.d();
    nv_ = nv;
    hbias_ = model.hbias;
    wproj_ = Mat(nh, d);
    double wmax = 1e-12;
    for (double x : model.w.a) wmax = std::max(wmax, std::abs(x));
    for (int a = 0; a < nh; ++a)
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < nv; ++i) s += model.w(a, i) * pca.u(k, i);
            wproj_(a, k) = s;
        }
    // weight rows must lie in the PCA span
    for (int a = 0; a < nh; ++a)
        for (int i = 0; i < nv; ++i) {
            double rec = 0.0;
            for (int k = 0; k < d; ++k) rec += wproj_(a, k) * pca.u(k, i);
            if (std::abs(rec - model.w(a, i)) > span_tol * std::max(1.0, wmax))
                throw std::invalid_argument(
                    "LowRankRbmEnergy: weight matrix is not rank-d in the PCA basis");
        }
    const double invroot = 1.0 / std::sqrt(double(nv));
    theta_.assign(std::size_t(d) + 1, 0.0);
    for (int i = 0; i < nv; ++i) theta_[0] += model.vbias[i] * pca.u0[i] * invroot;
    for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int i = 0; i < nv; ++i) s += model.vbias[i] * pca.u(k, i);
        theta_[std::size_t(k) + 1] = s * invroot;
    }
}

double LowRankRbmEnergy::longitudinal(const Vec& m) const {
    const int nh = wproj_.rows, d = wproj_.cols;
    const double root = std::sqrt(double(nv_));
    double e = 0.0;
    for (int k = 0; k < d; ++k) e -= nv_ * theta_[std::size_t(k) + 1] * m[std::size_t(k)];
    for (int a = 0; a < nh; ++a) {
        double s = hbias_[std::size_t(a)];
        for (int k = 0; k < d; ++k) s += root * wproj_(a, k) * m[std::size_t(k)];
        e -= log2cosh(s);
    }
    return e;
}

double LowRankRbmEnergy::bias(double m0) const { return -double(nv_) * theta_[0] * m0; }

namespace {

constexpr double kPi = 3.14159265358979323846;

// quasi-random directions on the half-sphere (antipodal planes coincide)
Mat half_sphere_directions(int d, int count) {
    Mat n(count, d);
    if (d == 1) {
        for (int j = 0; j < count; ++j) n(j, 0) = 1.0;
        return n;
    }
    if (d == 2) {
        for (int j = 0; j < count; ++j) {
            const double phi = kPi * (j + 0.5) / count;
            n(j, 0) = std::cos(phi);
            n(j, 1) = std::sin(phi);
        }
        return n;
    }
    if (d == 3) {
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int j = 0; j < count; ++j) {
            const double z = (j + 0.5) / count;  // upper hemisphere
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * kPi * std::fmod(j / golden, 1.0);
            n(j, 0) = r * std::cos(phi);
            n(j, 1) = r * std::sin(phi);
            n(j, 2) = z;
        }
        return n;
    }
    // d == 4: deterministic quasi-random Gaussians, normalized, hemisphere-fixed
    RngStream rng(0x4D15, 4);
    for (int j = 0; j < count; ++j) {
        double norm = 0.0;
        for (int k = 0; k < d; ++k) {
            n(j, k) = rng.normal();
            norm += n(j, k) * n(j, k);
        }
        norm = std::sqrt(norm);
        const double sgn = n(j, d - 1) >= 0.0 ? 1.0 : -1.0;
        for (int k = 0; k < d; ++k) n(j, k) *= sgn / norm;
    }
    return n;
}

}  // namespace

HyperplaneFamily make_hyperplane_family(const Mat& projected_data, int budget,
                                        double margin_frac) {
    const int d = projected_data.cols;
    if (budget < 1) throw std::invalid_argument("make_hyperplane_family: empty budget");
    int ndirs, per;
    switch (d) {
        case 1: ndirs = 1; per = budget; break;
        case 2: per = 16; ndirs = std::max(1, (budget + per - 1) / per); break;
        case 3: per = 8; ndirs = std::max(1, (budget + per - 1) / per); break;
        default: per = 6; ndirs = std::max(1, (budget + per - 1) / per); break;
    }
    const Mat dirs = half_sphere_directions(d, ndirs);

    HyperplaneFamily fam;
    fam.normals = Mat(ndirs * per, d);
    fam.offsets.assign(std::size_t(ndirs) * per, 0.0);
    int row = 0;
    for (int j = 0; j < ndirs; ++j) {
        double lo = 1e300, hi = -1e300;
        for (int r = 0; r < projected_data.rows; ++r) {
            double p = 0.0;
            for (int k = 0; k < d; ++k) p += dirs(j, k) * projected_data(r, k);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        const double margin = std::max(margin_frac * (hi - lo), 0.05);
        const double zlo = -(hi + margin), zhi = -(lo - margin);
        for (int o = 0; o < per; ++o, ++row) {
            for (int k = 0; k < d; ++k) fam.normals(row, k) = dirs(j, k);
            fam.offsets[std::size_t(row)] =
                per == 1 ? 0.5 * (zlo + zhi) : zlo + (zhi - zlo) * o / double(per - 1);
        }
    }
    return fam;
}

namespace {

// per-cell entropy scaffold reused across training iterations
struct GridScaffold {
    std::vector<MeshAxis> axes;
    Vec neg_nv_rate;                 // -Nv I(m_c), -inf for infeasible cells
    std::vector<std::uint8_t> feasible;
    Mat centers;                     // C x d
    std::size_t ncells() const { return neg_nv_rate.size(); }
};

GridScaffold make_scaffold(const Mat& basis, int nv,
                           const std::vector<std::pair<double, double>>& ranges, int bins) {
    GridScaffold g;
    const int d = basis.rows;
    g.axes.resize(std::size_t(d));
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) {
        g.axes[std::size_t(k)] = {ranges[std::size_t(k)].first, ranges[std::size_t(k)].second,
                                  bins};
        n *= std::size_t(bins);
    }
    g.neg_nv_rate.assign(n, -std::numeric_limits<double>::infinity());
    g.feasible.assign(n, 0);
    g.centers = Mat(int(n), d);

    const std::size_t per = n / std::size_t(bins);
    parallel_for(bins, [&](int s) {
        Vec warm(std::size_t(d), 0.0);
        bool have_warm = false;
        for (std::size_t j = 0; j < per; ++j) {
            const std::size_t idx = std::size_t(s) * per + j;
            // decode index to center
            std::size_t rem = idx;
            Vec m(std::size_t(d), 0.0);
            for (int k = d - 1; k >= 0; --k) {
                const int b = int(rem % std::size_t(bins));
                rem /= std::size_t(bins);
                m[std::size_t(k)] = g.axes[std::size_t(k)].center(b);
            }
            for (int k = 0; k < d; ++k) g.centers(int(idx), k) = m[std::size_t(k)];
            MuStarResult r = solve_mu_star(basis, m, have_warm ? &warm : nullptr);
            if (!r.converged) r = solve_mu_star(basis, m, nullptr);
            if (!r.converged) {
                have_warm = false;
                continue;
            }
            warm = r.mu;
            have_warm = true;
            g.neg_nv_rate[idx] = -double(nv) * (dot(m, r.mu) - phi(basis, r.mu));
            g.feasible[idx] = 1;
        }
    });
    return g;
}

}  // namespace

RcmModel rcm_train(const BinaryDataset& data, const PcaBasis& pca, const RcmTrainOptions& opt,
                   Vec* objective_trace) {
    const int d = pca.d(), nv = pca.nv();
    const double root = std::sqrt(double(nv));
    const Mat proj = project_dataset(pca, data);
    const Vec proj0 = project_dataset_bias(pca, data);
    const int mrows = proj.rows;

    const HyperplaneFamily fam = make_hyperplane_family(proj, opt.hyperplane_budget);
    const int K = fam.normals.rows;

    // mesh scaffolds (entropy fixed across iterations)
    const auto ranges = default_mesh_ranges(pca, proj);
    const GridScaffold grid = make_scaffold(pca.u, nv, ranges, opt.bins_per_dim);
    Mat b0(1, nv);
    for (int i = 0; i < nv; ++i) b0(0, i) = pca.u0[i];
    const auto brange = default_bias_range(pca, proj0);
    const GridScaffold grid0 = make_scaffold(b0, nv, {brange}, opt.bias_bins);
    const std::size_t C = grid.ncells();

    // Positive phase binned onto the same grid atoms as the negative phase:
    // with the kinked |.| features, moments taken at exact data points differ
    // from any cell-centred density by O(cell width), which would put the
    // stationarity target below the discretization floor.
    Vec data_hist(C, 0.0);
    for (int r = 0; r < mrows; ++r) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) {
            int b = grid.axes[std::size_t(k)].locate(proj(r, k));
            if (b < 0) b = proj(r, k) < grid.axes[std::size_t(k)].lo
                               ? 0
                               : grid.axes[std::size_t(k)].bins - 1;
            idx = idx * std::size_t(grid.axes[std::size_t(k)].bins) + std::size_t(b);
        }
        data_hist[idx] += 1.0 / mrows;
    }
    Vec data_hist0(grid0.ncells(), 0.0);
    for (double x : proj0) {
        int b = grid0.axes[0].locate(x);
        if (b < 0) b = x < grid0.axes[0].lo ? 0 : grid0.axes[0].bins - 1;
        data_hist0[std::size_t(b)] += 1.0 / mrows;
    }

    Vec data_m(std::size_t(d), 0.0);
    double data_m0 = 0.0;
    for (std::size_t c = 0; c < C; ++c)
        for (int k = 0; k < d; ++k) data_m[std::size_t(k)] += data_hist[c] * grid.centers(int(c), k);
    for (std::size_t c = 0; c < grid0.ncells(); ++c)
        data_m0 += data_hist0[c] * grid0.centers(int(c), 0);
    Vec data_abs(std::size_t(K), 0.0);
    parallel_for(K, [&](int a) {
        double s = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            double p = fam.offsets[std::size_t(a)];
            for (int k = 0; k < d; ++k) p += fam.normals(a, k) * grid.centers(int(c), k);
            s += data_hist[c] * std::abs(p);
        }
        data_abs[std::size_t(a)] = s;
    });

    // per-cell hyperplane features |n_a . m_c + z_a|
    Mat feat(K, int(C));
    parallel_for(K, [&](int a) {
        for (std::size_t c = 0; c < C; ++c) {
            double p = fam.offsets[std::size_t(a)];
            for (int k = 0; k < d; ++k) p += fam.normals(a, k) * grid.centers(int(c), k);
            feat(a, int(c)) = std::abs(p);
        }
    });

    Vec q(std::size_t(K), opt.q_init), theta(std::size_t(d) + 1, 0.0);
    Vec logdens(C), p(C), logdens0(grid0.ncells()), p0(grid0.ncells());

    auto densify = [&](const Vec& qv, const Vec& th, double& logmass, double& logmass0) {
        parallel_for(int(C), [&](int ci) {
            const std::size_t c = std::size_t(ci);
            if (!grid.feasible[c]) {
                logdens[c] = -std::numeric_limits<double>::infinity();
                return;
            }
            double e = grid.neg_nv_rate[c];
            for (int k = 0; k < d; ++k)
                e += nv * th[std::size_t(k) + 1] * grid.centers(ci, k);
            double qsum = 0.0;
            for (int a = 0; a < K; ++a) qsum += qv[std::size_t(a)] * feat(a, ci);
            logdens[c] = e + root * qsum;
        });
        logmass = logsumexp(logdens);
        for (std::size_t c = 0; c < C; ++c) p[c] = std::exp(logdens[c] - logmass);
        for (std::size_t c = 0; c < grid0.ncells(); ++c)
            logdens0[c] = grid0.feasible[c]
                              ? grid0.neg_nv_rate[c] + nv * th[0] * grid0.centers(int(c), 0)
                              : -std::numeric_limits<double>::infinity();
        logmass0 = logsumexp(logdens0);
        for (std::size_t c = 0; c < grid0.ncells(); ++c) p0[c] = std::exp(logdens0[c] - logmass0);
    };

    auto objective = [&](const Vec& qv, const Vec& th, double logmass, double logmass0) {
        double j = nv * th[0] * data_m0 - logmass0 - logmass;
        for (int k = 0; k < d; ++k) j += nv * th[std::size_t(k) + 1] * data_m[std::size_t(k)];
        for (int a = 0; a < K; ++a) j += root * qv[std::size_t(a)] * data_abs[std::size_t(a)];
        return j;
    };

    double logmass = 0.0, logmass0 = 0.0;
    densify(q, theta, logmass, logmass0);
    double obj = objective(q, theta, logmass, logmass0);
    if (objective_trace) objective_trace->push_back(obj);
    bool converged = false;
    double damping = 1e-6;

    // Projected Newton on the concave log-likelihood.  The plane family is
    // strongly collinear, so the full feature covariance is needed for
    // useful steps; the block is small (K + d + 1 parameters).  theta_0
    // lives on its own grid and decouples exactly.
    const int nfree = K + d;
    Vec grad(std::size_t(nfree) + 1, 0.0);  // q block, theta block, then theta_0
    for (int it = 0; it < opt.max_iterations; ++it) {
        // first and second moments of (features, m) under the model
        Vec ef(std::size_t(K), 0.0), em(std::size_t(d), 0.0);
        Mat cov(nfree, nfree, 0.0);
        parallel_for(K, [&](int a) {
            double s = 0.0;
            for (std::size_t c = 0; c < C; ++c) s += p[c] * feat(a, int(c));
            ef[std::size_t(a)] = s;
        });
        for (std::size_t c = 0; c < C; ++c)
            if (grid.feasible[c])
                for (int k = 0; k < d; ++k) em[std::size_t(k)] += p[c] * grid.centers(int(c), k);
        parallel_for(K, [&](int a) {
            for (int b = a; b < K; ++b) {
                double s = 0.0;
                for (std::size_t c = 0; c < C; ++c) s += p[c] * feat(a, int(c)) * feat(b, int(c));
                cov(a, b) = s - ef[std::size_t(a)] * ef[std::size_t(b)];
                cov(b, a) = cov(a, b);
            }
            for (int k = 0; k < d; ++k) {
                double s = 0.0;
                for (std::size_t c = 0; c < C; ++c)
                    s += p[c] * feat(a, int(c)) * grid.centers(int(c), k);
                cov(a, K + k) = s - ef[std::size_t(a)] * em[std::size_t(k)];
                cov(K + k, a) = cov(a, K + k);
            }
        });
        for (int k = 0; k < d; ++k)
            for (int l = k; l < d; ++l) {
                double s = 0.0;
                for (std::size_t c = 0; c < C; ++c)
                    if (grid.feasible[c])
                        s += p[c] * grid.centers(int(c), k) * grid.centers(int(c), l);
                cov(K + k, K + l) = s - em[std::size_t(k)] * em[std::size_t(l)];
                cov(K + l, K + k) = cov(K + k, K + l);
            }
        double em0 = 0.0, em02 = 0.0;
        for (std::size_t c = 0; c < grid0.ncells(); ++c)
            if (grid0.feasible[c]) {
                const double mc = grid0.centers(int(c), 0);
                em0 += p0[c] * mc;
                em02 += p0[c] * mc * mc;
            }

        // moment gaps (the gradient in the preconditioned metric)
        for (int a = 0; a < K; ++a) grad[std::size_t(a)] = data_abs[std::size_t(a)] - ef[std::size_t(a)];
        for (int k = 0; k < d; ++k) grad[std::size_t(K + k)] = data_m[std::size_t(k)] - em[std::size_t(k)];
        grad[std::size_t(nfree)] = data_m0 - em0;

        // KKT stationarity: interior coordinates need vanishing gaps; planes
        // clamped at q=0 only need a non-positive one
        double gmax = std::abs(grad[std::size_t(nfree)]);
        for (int a = 0; a < K; ++a)
            if (q[std::size_t(a)] > 0.0 || grad[std::size_t(a)] > 0.0)
                gmax = std::max(gmax, std::abs(grad[std::size_t(a)]));
        for (int k = 0; k < d; ++k) gmax = std::max(gmax, std::abs(grad[std::size_t(K + k)]));
        if (gmax <= opt.gradient_tol) {
            converged = true;
            break;
        }

        // Newton system on the active coordinates, in the true scaling:
        // grad_J = D g, hess_J = -D Cov D with D = diag(sqrt(Nv)...,Nv...).
        // Levenberg-Marquardt damping handles the near-singular plane block.
        std::vector<int> free;
        for (int a = 0; a < K; ++a)
            if (q[std::size_t(a)] > 0.0 || grad[std::size_t(a)] > 0.0) free.push_back(a);
        for (int k = 0; k < d; ++k) free.push_back(K + k);
        const int nf = int(free.size());
        const double step0 = grad[std::size_t(nfree)] / (nv * std::max(em02 - em0 * em0, 1e-12));

        bool accepted = false;
        for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
            Mat h(nf, nf);
            Vec rhs(std::size_t(nf), 0.0);
            for (int i = 0; i < nf; ++i) {
                const double di = free[std::size_t(i)] < K ? root : double(nv);
                rhs[std::size_t(i)] = di * grad[std::size_t(free[std::size_t(i)])];
                for (int j = 0; j < nf; ++j) {
                    const double dj = free[std::size_t(j)] < K ? root : double(nv);
                    h(i, j) = di * dj * cov(free[std::size_t(i)], free[std::size_t(j)]);
                }
            }
            double hmax = 1e-300;
            for (int i = 0; i < nf; ++i) hmax = std::max(hmax, h(i, i));
            for (int i = 0; i < nf; ++i) h(i, i) += damping * hmax;
            Vec sol;
            try {
                sol = solve_spd(h, rhs);
            } catch (const std::runtime_error&) {
                damping = std::max(damping * 10.0, 1e-12);
                continue;
            }
            Vec qt(q), tht(theta);
            for (int i = 0; i < nf; ++i) {
                const int c = free[std::size_t(i)];
                if (c < K)
                    qt[std::size_t(c)] = std::max(0.0, qt[std::size_t(c)] + sol[std::size_t(i)]);
                else
                    tht[std::size_t(c - K) + 1] += sol[std::size_t(i)];
            }
            tht[0] += step0;
            double lm, lm0;
            densify(qt, tht, lm, lm0);
            const double tobj = objective(qt, tht, lm, lm0);
            if (tobj >= obj - 1e-12) {
                q = std::move(qt);
                theta = std::move(tht);
                logmass = lm;
                logmass0 = lm0;
                obj = tobj;
                if (objective_trace) objective_trace->push_back(obj);
                accepted = true;
                damping = std::max(damping / 3.0, 1e-12);
            } else {
                damping = std::min(damping * 10.0, 1e12);
            }
        }
        if (!accepted) break;  // damping exhausted; report best iterate as non-converged
    }

    // drop hyperplanes with negligible weight
    double qmax = 0.0;
    for (double x : q) qmax = std::max(qmax, x);
    std::vector<int> keep;
    for (int a = 0; a < K; ++a)
        if (q[std::size_t(a)] > opt.prune_fraction * qmax) keep.push_back(a);

    RcmModel out;
    out.pca = pca;
    out.normals = Mat(int(keep.size()), d);
    out.offsets.resize(keep.size());
    out.qweights.resize(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (int k = 0; k < d; ++k) out.normals(int(i), k) = fam.normals(keep[i], k);
        out.offsets[i] = fam.offsets[std::size_t(keep[i])];
        out.qweights[i] = q[std::size_t(keep[i])];
    }
    out.theta = theta;
    out.converged = converged;
    out.validate();
    return out;
}

MagnetizationMesh build_rcm_mesh(const RcmModel& m, const Mat& projected_data,
                                 const Vec& projected_bias, int bins_per_dim, int bias_bins) {
    MeshOptions opt;
    opt.bins_per_dim = bins_per_dim;
    opt.bias_bins = bias_bins;
    opt.ranges = default_mesh_ranges(m.pca, projected_data);
    opt.bias_range = default_bias_range(m.pca, projected_bias);
    RcmEnergy en(m);
    return build_mesh(m.pca, en, opt);
}

RbmModel rcm_to_rbm(const RcmModel& m, int nh_target, double noise_scale,
                    std::uint64_t noise_seed) {
    m.validate();
    const int K = m.planes(), d = m.d(), nv = m.pca.nv();
    if (K > nh_target)
        throw std::invalid_argument("rcm_to_rbm: " + std::to_string(K) +
                                    " surviving hyperplanes exceed Nh target " +
                                    std::to_string(nh_target));
    const double root = std::sqrt(double(nv));
    RbmModel out = RbmModel::zeros(nv, nh_target, Convention::PlusMinus);
    for (int a = 0; a < K; ++a) {
        const double qa = m.qweights[std::size_t(a)];
        for (int i = 0; i < nv; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += m.normals(a, k) * m.pca.u(k, i);
            out.w(a, i) = qa * s;
        }
        out.hbias[a] = root * qa * m.offsets[std::size_t(a)];
    }
    if (noise_scale > 0.0) {
        RngStream rng(noise_seed, 0x11F7);
        for (int a = K; a < nh_target; ++a)
            for (int i = 0; i < nv; ++i) out.w(a, i) = noise_scale * rng.normal();
    }
    for (int i = 0; i < nv; ++i) {
        double s = m.theta[0] * m.pca.u0[i];
        for (int k = 0; k < d; ++k) s += m.theta[std::size_t(k) + 1] * m.pca.u(k, i);
        out.vbias[i] = root * s;
    }
    return out;
}

RcmModel project_rbm_to_rcm(const RbmModel& model, const PcaBasis& pca) {
    if (model.conv != Convention::PlusMinus)
        throw std::invalid_argument("project_rbm_to_rcm: model must be +-1");
    const int nh = model.nh(), nv = model.nv(), d = pca.d();
    const double root = std::sqrt(double(nv));
    RcmModel out;
    out.pca = pca;
    out.normals = Mat(nh, d);
    out.offsets.assign(std::size_t(nh), 0.0);
    out.qweights.assign(std::size_t(nh), 0.0);
    for (int a = 0; a < nh; ++a) {
        Vec wp(std::size_t(d), 0.0);
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < nv; ++i) s += model.w(a, i) * pca.u(k, i);
            wp[std::size_t(k)] = s;
        }
        const double qa = std::sqrt(dot(wp, wp));
        out.qweights[std::size_t(a)] = qa;
        if (qa > 0.0) {
            for (int k = 0; k < d; ++k) out.normals(a, k) = wp[std::size_t(k)] / qa;
            out.offsets[std::size_t(a)] = model.hbias[a] / (root * qa);
        } else {
            out.normals(a, 0) = 1.0;
        }
    }
    const double invroot = 1.0 / root;
    out.theta.assign(std::size_t(d) + 1, 0.0);
    for (int i = 0; i < nv; ++i) out.theta[0] += model.vbias[i] * pca.u0[i] * invroot;
    for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int i = 0; i < nv; ++i) s += model.vbias[i] * pca.u(k, i);
        out.theta[std::size_t(k) + 1] = s * invroot;
    }
    out.converged = true;
    return out;
}

namespace {

void write_block(std::ofstream& f, const double* p, std::size_t n) {
    f.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
}

void read_block(std::ifstream& f, double* p, std::size_t n, const std::string& what) {
    f.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
    if (std::size_t(f.gcount()) != n * sizeof(double))
        throw std::runtime_error("RCM1: truncated payload reading " + what);
}

}  // namespace

void save_rcm(const RcmModel& m, const std::string& path) {
    m.validate();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "RCM1\n";
    f << "d=" << m.d() << " nv=" << m.pca.nv() << " planes=" << m.planes()
      << " converged=" << (m.converged ? 1 : 0) << "\n";
    write_block(f, m.pca.u.a.data(), m.pca.u.a.size());
    write_block(f, m.pca.u0.data(), m.pca.u0.size());
    write_block(f, m.pca.mean.data(), m.pca.mean.size());
    write_block(f, m.normals.a.data(), m.normals.a.size());
    write_block(f, m.offsets.data(), m.offsets.size());
    write_block(f, m.qweights.data(), m.qweights.size());
    write_block(f, m.theta.data(), m.theta.size());
    if (!f) throw std::runtime_error("write failed: " + path);
}

RcmModel load_rcm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    std::getline(f, magic);
    if (magic != "RCM1") throw std::runtime_error("RCM1: bad magic in " + path);
    std::string meta;
    std::getline(f, meta);
    int d = -1, nv = -1, planes = -1, conv = 1;
    std::istringstream ms(meta);
    std::string tok;
    while (ms >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::runtime_error("RCM1: malformed metadata");
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "d") d = std::stoi(v);
        else if (k == "nv") nv = std::stoi(v);
        else if (k == "planes") planes = std::stoi(v);
        else if (k == "converged") conv = std::stoi(v);
    }
    if (d <= 0 || nv <= 0 || planes < 0) throw std::runtime_error("RCM1: missing dimensions");
    RcmModel m;
    m.pca.u = Mat(d, nv);
    m.pca.u0.resize(std::size_t(nv));
    m.pca.mean.resize(std::size_t(nv));
    m.normals = Mat(planes, d);
    m.offsets.resize(std::size_t(planes));
    m.qweights.resize(std::size_t(planes));
    m.theta.resize(std::size_t(d) + 1);
    read_block(f, m.pca.u.a.data(), m.pca.u.a.size(), "u");
    read_block(f, m.pca.u0.data(), m.pca.u0.size(), "u0");
    read_block(f, m.pca.mean.data(), m.pca.mean.size(), "mean");
    read_block(f, m.normals.a.data(), m.normals.a.size(), "normals");
    read_block(f, m.offsets.data(), m.offsets.size(), "offsets");
    read_block(f, m.qweights.data(), m.qweights.size(), "q");
    read_block(f, m.theta.data(), m.theta.size(), "theta");
    m.converged = conv != 0;
    m.validate();
    return m;
}

}  // namespace rbm
