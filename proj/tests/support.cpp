#include "support.hpp"

#include <cmath>
#include <stdexcept>

#include "rbm/exact.hpp"
#include "rbm/rng.hpp"

namespace testsup {

using rbm::Configuration;
using rbm::RbmModel;
using rbm::State;
using rbm::Vec;

double brute_energy(const RbmModel& m, const Configuration& x) {
    double e = 0.0;
    for (int i = 0; i < m.nv(); ++i)
        for (int a = 0; a < m.nh(); ++a) e -= x.v[i] * m.w(a, i) * x.h[a];
    for (int i = 0; i < m.nv(); ++i) e -= m.vbias[i] * x.v[i];
    for (int a = 0; a < m.nh(); ++a) e -= m.hbias[a] * x.h[a];
    return e;
}

namespace {

State decode(std::uint32_t code, int n, rbm::Convention c) {
    State s(n);
    for (int j = 0; j < n; ++j)
        s[j] = (code >> j) & 1 ? std::int8_t(1)
                               : (c == rbm::Convention::ZeroOne ? std::int8_t(0) : std::int8_t(-1));
    return s;
}

}  // namespace

double brute_log_partition(const RbmModel& m) {
    const int nv = m.nv(), nh = m.nh();
    if (nv + nh > 26) throw std::invalid_argument("brute_log_partition: too large");
    Vec terms;
    terms.reserve(std::size_t(1) << (nv + nh));
    Configuration x;
    for (std::uint32_t cv = 0; cv < (1u << nv); ++cv) {
        x.v = decode(cv, nv, m.conv);
        for (std::uint32_t ch = 0; ch < (1u << nh); ++ch) {
            x.h = decode(ch, nh, m.conv);
            terms.push_back(-brute_energy(m, x));
        }
    }
    return rbm::logsumexp(terms);
}

Vec brute_visible_distribution(const RbmModel& m) {
    const int nv = m.nv(), nh = m.nh();
    const double logz = brute_log_partition(m);
    Vec p(std::size_t(1) << nv, 0.0);
    Configuration x;
    for (std::uint32_t cv = 0; cv < (1u << nv); ++cv) {
        x.v = decode(cv, nv, m.conv);
        Vec terms;
        for (std::uint32_t ch = 0; ch < (1u << nh); ++ch) {
            x.h = decode(ch, nh, m.conv);
            terms.push_back(-brute_energy(m, x));
        }
        p[cv] = std::exp(rbm::logsumexp(terms) - logz);
    }
    return p;
}

RbmModel random_model(int nv, int nh, rbm::Convention c, std::uint64_t seed, double scale) {
    rbm::RngStream rng(seed, 0x7357);
    RbmModel m = RbmModel::zeros(nv, nh, c);
    for (auto& x : m.w.a) x = scale * rng.normal();
    for (auto& x : m.vbias) x = scale * rng.normal();
    for (auto& x : m.hbias) x = scale * rng.normal();
    return m;
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double eps = 1e-15, fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_p(const std::vector<long>& counts, const Vec& probs) {
    if (counts.size() != probs.size()) throw std::invalid_argument("chi_square_p: size mismatch");
    long total = 0;
    for (long c : counts) total += c;
    // pool cells with expected count below 5 into one bucket
    double chi2 = 0.0, pooled_exp = 0.0;
    long pooled_obs = 0;
    int dof = -1;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double e = probs[i] * double(total);
        if (e < 5.0) {
            pooled_exp += e;
            pooled_obs += counts[i];
            continue;
        }
        const double d = counts[i] - e;
        chi2 += d * d / e;
        ++dof;
    }
    if (pooled_exp > 0.0) {
        const double d = pooled_obs - pooled_exp;
        chi2 += d * d / pooled_exp;
        ++dof;
    }
    if (dof < 1) throw std::runtime_error("chi_square_p: not enough populated cells");
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

double mean(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / double(x.size());
}

double stddev(const Vec& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / double(x.size() > 1 ? x.size() - 1 : 1));
}

KMeans kmeans(const rbm::Mat& points, int k, std::uint64_t seed) {
    const int n = points.rows, dim = points.cols;
    rbm::RngStream rng(seed, 0x535);
    KMeans best;
    double best_cost = 1e300;
    for (int restart = 0; restart < 8; ++restart) {
        rbm::Mat centers(k, dim);
        for (int c = 0; c < k; ++c) {
            const int pick = int(rng.below(std::uint64_t(n)));
            for (int j = 0; j < dim; ++j) centers(c, j) = points(pick, j);
        }
        std::vector<int> assign(std::size_t(n), 0);
        for (int it = 0; it < 100; ++it) {
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                int arg = 0;
                double bd = 1e300;
                for (int c = 0; c < k; ++c) {
                    double d2 = 0.0;
                    for (int j = 0; j < dim; ++j) {
                        const double d = points(i, j) - centers(c, j);
                        d2 += d * d;
                    }
                    if (d2 < bd) {
                        bd = d2;
                        arg = c;
                    }
                }
                if (assign[std::size_t(i)] != arg) {
                    assign[std::size_t(i)] = arg;
                    changed = true;
                }
            }
            centers = rbm::Mat(k, dim, 0.0);
            std::vector<int> cnt(std::size_t(k), 0);
            for (int i = 0; i < n; ++i) {
                ++cnt[std::size_t(assign[std::size_t(i)])];
                for (int j = 0; j < dim; ++j) centers(assign[std::size_t(i)], j) += points(i, j);
            }
            for (int c = 0; c < k; ++c)
                if (cnt[std::size_t(c)] > 0)
                    for (int j = 0; j < dim; ++j) centers(c, j) /= cnt[std::size_t(c)];
            if (!changed) break;
        }
        double cost = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < dim; ++j) {
                const double d = points(i, j) - centers(assign[std::size_t(i)], j);
                cost += d * d;
            }
        if (cost < best_cost) {
            best_cost = cost;
            best.centers = centers;
            best.assign = assign;
        }
    }
    return best;
}

}  // namespace testsup
