#include "rbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbm/chain.hpp"
#include "rbm/linalg.hpp"

namespace rbm {

Separator default_separator(const PcaBasis& pca, const std::vector<State>& data_pm) {
    if (pca.d() < 2) throw std::invalid_argument("default_separator: need d >= 2");
    double cx = 0.0;
    const double inv = 1.0 / std::sqrt(double(pca.nv()));
    for (const State& v : data_pm) {
        double s = 0.0;
        for (int i = 0; i < pca.nv(); ++i) s += pca.u(0, i) * v[i];
        cx += s * inv;
    }
    cx /= double(data_pm.size());
    Separator sep;
    sep.normal = {1.0, 0.0};  // perpendicular to PC1 in the (PC1, PC2) plane
    sep.offset = cx;
    return sep;
}

JumpReport mode_jumps(const std::vector<std::vector<std::array<double, 2>>>& projections,
                      const Separator& sep) {
    if (projections.empty()) throw std::invalid_argument("mode_jumps: empty history");
    JumpReport rep;
    rep.per_chain.reserve(projections.size());
    for (const auto& hist : projections) {
        if (hist.empty()) throw std::invalid_argument("mode_jumps: empty chain history");
        long jumps = 0;
        int side = 0;  // unresolved until the first nonzero distance
        for (const auto& p : hist) {
            const double d = sep.signed_distance(p[0], p[1]);
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0) continue;
            if (side != 0 && s != side) ++jumps;
            side = s;
        }
        rep.per_chain.push_back(jumps);
    }
    double m = 0.0;
    for (long j : rep.per_chain) m += double(j);
    m /= double(rep.per_chain.size());
    double var = 0.0;
    for (long j : rep.per_chain) var += (double(j) - m) * (double(j) - m);
    rep.mean = m;
    rep.stderr_mean = rep.per_chain.size() > 1
                          ? std::sqrt(var / (double(rep.per_chain.size()) *
                                             double(rep.per_chain.size() - 1)))
                          : 0.0;
    return rep;
}

namespace {

double distance(const State& a, const State& b, Metric metric) {
    double d = 0.0;
    if (metric == Metric::Hamming) {
        for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1.0 : 0.0;
        return d;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = double(a[i]) - double(b[i]);
        d += x * x;
    }
    return std::sqrt(d);
}

// nearest-neighbour distances within a set (self excluded) and across sets
void nn_distances(const std::vector<State>& from, const std::vector<State>& same,
                  const std::vector<State>& other, Metric metric, Vec& d_same, Vec& d_other) {
    const int n = int(from.size());
    d_same.assign(std::size_t(n), 0.0);
    d_other.assign(std::size_t(n), 0.0);
    parallel_for(n, [&](int i) {
        double best_same = 1e300, best_other = 1e300;
        for (int j = 0; j < int(same.size()); ++j) {
            if (&from == &same && i == j) continue;
            best_same = std::min(best_same, distance(from[std::size_t(i)], same[std::size_t(j)], metric));
        }
        for (const State& o : other)
            best_other = std::min(best_other, distance(from[std::size_t(i)], o, metric));
        d_same[std::size_t(i)] = best_same;
        d_other[std::size_t(i)] = best_other;
    });
}

}  // namespace

AatsResult aats(const std::vector<State>& real_set, const std::vector<State>& synth_set,
                Metric metric) {
    if (real_set.size() != synth_set.size())
        throw std::invalid_argument("aats: the two sets must have equal size");
    if (real_set.empty()) throw std::invalid_argument("aats: empty sets");

    Vec d_tt, d_ts, d_ss, d_st;
    nn_distances(real_set, real_set, synth_set, metric, d_tt, d_ts);
    nn_distances(synth_set, synth_set, real_set, metric, d_ss, d_st);

    auto score = [](const Vec& d_other, const Vec& d_same) {
        double s = 0.0;
        for (std::size_t i = 0; i < d_other.size(); ++i) {
            if (d_other[i] > d_same[i]) s += 1.0;
            else if (d_other[i] == d_same[i]) s += 0.5;
        }
        return s / double(d_other.size());
    };

    AatsResult out;
    out.aa_truth = score(d_ts, d_tt);
    out.aa_synth = score(d_st, d_ss);
    out.aa_ts = 0.5 * (out.aa_truth + out.aa_synth);
    return out;
}

double privacy_loss(const std::vector<State>& real_train, const std::vector<State>& real_test,
                    const std::vector<State>& synth, Metric metric) {
    const std::size_t n = std::min({real_train.size(), real_test.size(), synth.size()});
    if (n == 0) throw std::invalid_argument("privacy_loss: empty sets");
    const std::vector<State> tr(real_train.begin(), real_train.begin() + std::ptrdiff_t(n));
    const std::vector<State> te(real_test.begin(), real_test.begin() + std::ptrdiff_t(n));
    const std::vector<State> sy(synth.begin(), synth.begin() + std::ptrdiff_t(n));
    return aats(te, sy, metric).aa_ts - aats(tr, sy, metric).aa_ts;
}

MomentReport moment_report(const std::vector<State>& dataset, const std::vector<State>& samples,
                           const PcaBasis& pca, int tv_bins) {
    if (dataset.empty() || samples.empty())
        throw std::invalid_argument("moment_report: empty inputs");
    if (dataset[0].size() != samples[0].size())
        throw std::invalid_argument("moment_report: dimension mismatch");
    const int nv = int(dataset[0].size());

    MomentReport rep;
    rep.site_mean_error.assign(std::size_t(nv), 0.0);
    for (int i = 0; i < nv; ++i) {
        double a = 0.0, b = 0.0;
        for (const State& v : dataset) a += v[i];
        for (const State& v : samples) b += v[i];
        const double err = std::abs(a / double(dataset.size()) - b / double(samples.size()));
        rep.site_mean_error[std::size_t(i)] = err;
        rep.max_mean_error = std::max(rep.max_mean_error, err);
        rep.mean_abs_error += err / double(nv);
    }

    // covariance of the top-d projections
    const int d = pca.d();
    auto projected_cov = [&](const std::vector<State>& rows) {
        Mat proj(int(rows.size()), d);
        const double inv = 1.0 / std::sqrt(double(pca.nv()));
        for (int r = 0; r < int(rows.size()); ++r)
            for (int k = 0; k < d; ++k) {
                double s = 0.0;
                for (int i = 0; i < pca.nv(); ++i) s += pca.u(k, i) * rows[std::size_t(r)][std::size_t(i)];
                proj(r, k) = s * inv;
            }
        Vec mean(std::size_t(d), 0.0);
        for (int r = 0; r < proj.rows; ++r)
            for (int k = 0; k < d; ++k) mean[std::size_t(k)] += proj(r, k);
        for (double& x : mean) x /= proj.rows;
        Mat cov(d, d, 0.0);
        for (int r = 0; r < proj.rows; ++r)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    cov(k, l) += (proj(r, k) - mean[std::size_t(k)]) *
                                 (proj(r, l) - mean[std::size_t(l)]) / double(proj.rows);
        return std::pair<Mat, Mat>(std::move(cov), std::move(proj));
    };
    auto [cov_d, proj_d] = projected_cov(dataset);
    auto [cov_s, proj_s] = projected_cov(samples);
    Mat diff(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) diff(k, l) = cov_d(k, l) - cov_s(k, l);
    const EigenSym es = eigen_sym(diff);
    for (double l : es.values)
        rep.covariance_spectral_error = std::max(rep.covariance_spectral_error, std::abs(l));

    // 2-D projected TV distance at fixed binning over the data range
    if (d >= 2) {
        double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
        for (int r = 0; r < proj_d.rows; ++r) {
            lo0 = std::min(lo0, proj_d(r, 0));
            hi0 = std::max(hi0, proj_d(r, 0));
            lo1 = std::min(lo1, proj_d(r, 1));
            hi1 = std::max(hi1, proj_d(r, 1));
        }
        const double m0 = 0.05 * (hi0 - lo0) + 1e-9, m1 = 0.05 * (hi1 - lo1) + 1e-9;
        lo0 -= m0;
        hi0 += m0;
        lo1 -= m1;
        hi1 += m1;
        const int nb = tv_bins;
        auto hist = [&](const Mat& proj) {
            Vec h(std::size_t(nb) * nb, 0.0);
            double inside = 0.0;
            for (int r = 0; r < proj.rows; ++r) {
                const int b0 = int((proj(r, 0) - lo0) / (hi0 - lo0) * nb);
                const int b1 = int((proj(r, 1) - lo1) / (hi1 - lo1) * nb);
                if (b0 < 0 || b0 >= nb || b1 < 0 || b1 >= nb) continue;
                h[std::size_t(b0) * nb + std::size_t(b1)] += 1.0;
                inside += 1.0;
            }
            for (double& x : h) x /= double(proj.rows);
            // mass outside the box counts toward the distance
            return std::pair<Vec, double>(std::move(h), 1.0 - inside / proj.rows);
        };
        auto [hd, outd] = hist(proj_d);
        auto [hs, outs] = hist(proj_s);
        double tv = std::abs(outd - outs);
        for (std::size_t i = 0; i < hd.size(); ++i) tv += std::abs(hd[i] - hs[i]);
        rep.projected_tv = 0.5 * tv;
        rep.tv_bins = nb;
    }
    return rep;
}

}  // namespace rbm
