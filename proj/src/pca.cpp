#include "rbm/pca.hpp"

#include <cmath>
#include <stdexcept>

namespace rbm {

Vec PcaBasis::magnetizations(const State& v_pm) const {
    if (int(v_pm.size()) != nv()) throw std::invalid_argument("magnetizations: dimension mismatch");
    Vec m(std::size_t(d()) + 1, 0.0);
    const double inv = 1.0 / std::sqrt(double(nv()));
    double s0 = 0.0;
    for (int i = 0; i < nv(); ++i) s0 += u0[i] * v_pm[i];
    m[0] = s0 * inv;
    for (int k = 0; k < d(); ++k) {
        const double* uk = u.row(k);
        double s = 0.0;
        for (int i = 0; i < nv(); ++i) s += uk[i] * v_pm[i];
        m[std::size_t(k) + 1] = s * inv;
    }
    return m;
}

Vec PcaBasis::project(const State& v_pm) const {
    Vec m = magnetizations(v_pm);
    return Vec(m.begin() + 1, m.end());
}

Mat PcaBasis::full_basis() const {
    Mat b(d() + 1, nv());
    for (int i = 0; i < nv(); ++i) b(0, i) = u0[i];
    for (int k = 0; k < d(); ++k)
        for (int i = 0; i < nv(); ++i) b(k + 1, i) = u(k, i);
    return b;
}

PcaBasis fit_pca(const BinaryDataset& data, int d) {
    if (d < 1) throw std::invalid_argument("fit_pca: d must be >= 1");
    if (data.size() < d + 1) throw std::invalid_argument("fit_pca: need at least d+1 rows");
    const BinaryDataset pm = data.converted(Convention::PlusMinus);
    const int nv = pm.nv(), m = pm.size();

    Vec mean(nv, 0.0);
    for (const State& r : pm.rows)
        for (int i = 0; i < nv; ++i) mean[i] += r[i];
    for (double& x : mean) x /= m;

    Mat cov(nv, nv, 0.0);
    Vec c(nv);
    for (const State& r : pm.rows) {
        for (int i = 0; i < nv; ++i) c[i] = r[i] - mean[i];
        for (int i = 0; i < nv; ++i) {
            const double ci = c[i];
            for (int j = i; j < nv; ++j) cov(i, j) += ci * c[j];
        }
    }
    for (int i = 0; i < nv; ++i)
        for (int j = i; j < nv; ++j) {
            cov(i, j) /= m;
            cov(j, i) = cov(i, j);
        }

    EigenSym es = eigen_sym(cov);
    const double lmax = es.values.empty() ? 0.0 : std::max(es.values[0], 0.0);
    int rank = 0;
    for (double l : es.values)
        if (l > std::max(lmax * 1e-10, 1e-14)) ++rank;
    if (rank < d)
        throw std::invalid_argument("fit_pca: centered data has only " + std::to_string(rank) +
                                    " nonzero singular values, need " + std::to_string(d));

    PcaBasis out;
    out.mean = mean;
    out.spectrum = es.values;
    out.u = Mat(d, nv);
    for (int k = 0; k < d; ++k) {
        // sign rule: largest-magnitude coordinate positive
        int arg = 0;
        for (int i = 1; i < nv; ++i)
            if (std::abs(es.vectors(k, i)) > std::abs(es.vectors(k, arg))) arg = i;
        const double sgn = es.vectors(k, arg) >= 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < nv; ++i) out.u(k, i) = sgn * es.vectors(k, i);
    }

    // Bias direction: normalized mean, orthogonalized against the principal
    // rows; falls back to the uniform direction for centered data.
    Vec u0 = mean;
    for (int k = 0; k < d; ++k) {
        const double* uk = out.u.row(k);
        double p = 0.0;
        for (int i = 0; i < nv; ++i) p += u0[i] * uk[i];
        for (int i = 0; i < nv; ++i) u0[i] -= p * uk[i];
    }
    double norm = std::sqrt(dot(u0, u0));
    if (norm < 1e-8) {
        u0.assign(nv, 1.0 / std::sqrt(double(nv)));
        for (int k = 0; k < d; ++k) {
            const double* uk = out.u.row(k);
            double p = 0.0;
            for (int i = 0; i < nv; ++i) p += u0[i] * uk[i];
            for (int i = 0; i < nv; ++i) u0[i] -= p * uk[i];
        }
        norm = std::sqrt(dot(u0, u0));
        if (norm < 1e-8) throw std::runtime_error("fit_pca: cannot construct a bias direction");
    }
    for (double& x : u0) x /= norm;
    out.u0 = u0;
    return out;
}

Mat project_dataset(const PcaBasis& pca, const BinaryDataset& data) {
    const BinaryDataset pm = data.converted(Convention::PlusMinus);
    Mat out(pm.size(), pca.d());
    const double inv = 1.0 / std::sqrt(double(pca.nv()));
    for (int r = 0; r < pm.size(); ++r)
        for (int k = 0; k < pca.d(); ++k) {
            const double* uk = pca.u.row(k);
            double s = 0.0;
            for (int i = 0; i < pca.nv(); ++i) s += uk[i] * pm.rows[r][i];
            out(r, k) = s * inv;
        }
    return out;
}

Vec project_dataset_bias(const PcaBasis& pca, const BinaryDataset& data) {
    const BinaryDataset pm = data.converted(Convention::PlusMinus);
    Vec out(pm.size());
    const double inv = 1.0 / std::sqrt(double(pca.nv()));
    for (int r = 0; r < pm.size(); ++r) {
        double s = 0.0;
        for (int i = 0; i < pca.nv(); ++i) s += pca.u0[i] * pm.rows[r][i];
        out[std::size_t(r)] = s * inv;
    }
    return out;
}

}  // namespace rbm
