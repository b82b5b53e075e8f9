#include "rbm/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace rbm {

namespace {

// tilt_i = sqrt(Nv) sum_k mu_k u_{k,i}
void tilts(const Mat& basis, const Vec& mu, Vec& out) {
    const int d = basis.rows, nv = basis.cols;
    const double root = std::sqrt(double(nv));
    out.assign(nv, 0.0);
    for (int k = 0; k < d; ++k) {
        const double* uk = basis.row(k);
        const double mk = root * mu[k];
        if (mk == 0.0) continue;
        for (int i = 0; i < nv; ++i) out[i] += mk * uk[i];
    }
}

}  // namespace

double phi(const Mat& basis, const Vec& mu) {
    Vec t;
    tilts(basis, mu, t);
    double s = 0.0;
    for (double x : t) s += std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::log(2.0);
    return s / double(basis.cols);
}

Vec phi_gradient(const Mat& basis, const Vec& mu) {
    const int d = basis.rows, nv = basis.cols;
    Vec t;
    tilts(basis, mu, t);
    for (double& x : t) x = std::tanh(x);
    Vec g(d, 0.0);
    const double inv = 1.0 / std::sqrt(double(nv));
    for (int k = 0; k < d; ++k) {
        const double* uk = basis.row(k);
        double s = 0.0;
        for (int i = 0; i < nv; ++i) s += uk[i] * t[i];
        g[k] = s * inv;
    }
    return g;
}

Mat phi_hessian(const Mat& basis, const Vec& mu) {
    const int d = basis.rows, nv = basis.cols;
    Vec t;
    tilts(basis, mu, t);
    for (double& x : t) {
        const double th = std::tanh(x);
        x = 1.0 - th * th;  // sech^2
    }
    Mat h(d, d, 0.0);
    for (int k = 0; k < d; ++k)
        for (int l = k; l < d; ++l) {
            const double* uk = basis.row(k);
            const double* ul = basis.row(l);
            double s = 0.0;
            for (int i = 0; i < nv; ++i) s += uk[i] * ul[i] * t[i];
            h(k, l) = s;
            h(l, k) = s;
        }
    return h;
}

MuStarResult solve_mu_star(const Mat& basis, const Vec& m, const Vec* warm_start) {
    const int d = basis.rows;
    if (int(m.size()) != d) throw std::invalid_argument("solve_mu_star: dimension mismatch");
    MuStarResult res;
    res.mu = warm_start ? *warm_start : Vec(d, 0.0);

    auto objective = [&](const Vec& mu) { return phi(basis, mu) - dot(m, mu); };

    double obj = objective(res.mu);
    for (int it = 0; it < 200; ++it) {
        res.iterations = it;
        Vec g = phi_gradient(basis, res.mu);
        double resid = 0.0;
        for (int k = 0; k < d; ++k) resid = std::max(resid, std::abs(g[k] - m[k]));
        if (resid <= 1e-10) {
            res.converged = true;
            return res;
        }
        Mat h = phi_hessian(basis, res.mu);
        // small ridge keeps the step defined near the polytope boundary
        for (int k = 0; k < d; ++k) h(k, k) += 1e-14;
        Vec rhs(d);
        for (int k = 0; k < d; ++k) rhs[k] = m[k] - g[k];
        Vec step;
        try {
            step = solve_spd(h, rhs);
        } catch (const std::runtime_error&) {
            return res;  // not converged
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vec trial(res.mu);
            for (int k = 0; k < d; ++k) trial[k] += lambda * step[k];
            const double tobj = objective(trial);
            if (tobj <= obj + 1e-15) {
                res.mu = std::move(trial);
                obj = tobj;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return res;  // wedged; report non-convergence
    }
    return res;
}

double rate_function(const Mat& basis, const Vec& m) {
    MuStarResult r = solve_mu_star(basis, m);
    if (!r.converged)
        throw std::runtime_error("rate_function: mu* solve did not converge (m outside support?)");
    return dot(m, r.mu) - phi(basis, r.mu);
}

}  // namespace rbm
