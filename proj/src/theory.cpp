#include "rbm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rbm/model.hpp"

namespace rbm {

Vec default_m_grid(int points, double span) {
    if (points < 3) throw std::invalid_argument("default_m_grid: need at least 3 points");
    Vec g(std::size_t(points), 0.0);
    for (int i = 0; i < points; ++i)
        g[std::size_t(i)] = -span + 2.0 * span * i / double(points - 1);
    return g;
}

namespace {

constexpr double kGolden = 0.61803398874989484820;

double golden_min(const std::function<double(double)>& f, double a, double b) {
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// golden section localizes each bracketed minimum; a few Newton steps on the
// analytic derivative push past the fp floor of value comparisons
void locate_minima(FreeEnergyCurve& curve, const std::function<double(double)>& f,
                   const std::function<double(double)>& fprime) {
    const std::size_t n = curve.m.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (curve.value[i] < curve.value[i - 1] && curve.value[i] < curve.value[i + 1]) {
            double m = golden_min(f, curve.m[i - 1], curve.m[i + 1]);
            for (int it = 0; it < 60; ++it) {
                const double h = 1e-6;
                const double d2 = (fprime(m + h) - fprime(m - h)) / (2.0 * h);
                if (d2 <= 0.0) break;
                const double step = fprime(m) / d2;
                m -= step;
                if (std::abs(step) < 1e-15) break;
            }
            if (m > curve.m[i - 1] && m < curve.m[i + 1]) curve.minima.push_back({m, f(m)});
        }
    }
}

}  // namespace

FreeEnergyCurve cw_rate_function(double beta, double h, const Vec& m_grid) {
    for (double m : m_grid)
        if (!(m > -1.0 && m < 1.0))
            throw std::invalid_argument("cw_rate_function: grid must lie inside (-1, 1)");
    auto omega = [beta, h](double m) { return 0.5 * beta * m * m - log2cosh(beta * m) + h * m; };
    auto omega_prime = [beta, h](double m) {
        return beta * m - beta * std::tanh(beta * m) + h;
    };
    FreeEnergyCurve curve;
    curve.m = m_grid;
    curve.value.reserve(m_grid.size());
    for (double m : m_grid) curve.value.push_back(omega(m));
    locate_minima(curve, omega, omega_prime);
    return curve;
}

// Constrained free energy of the Bernoulli-Gauss machine: for a fixed hidden
// overlap m_tau the visible sum is exact, giving per site
//   beta f(m_tau) = m_tau^2/2 - log(1 + exp(beta (w m_tau + eta)))
// whose stationary points satisfy m_tau = beta w sigm(beta(w m_tau + eta)).
FreeEnergyCurve toy_rbm_free_energy(double beta_t, double beta, const Vec& m_grid) {
    if (!(beta_t > 1.0))
        throw std::invalid_argument("toy_rbm_free_energy: beta_T must exceed 1 (bimodal data)");
    const double w = 2.0 * std::sqrt(beta_t);
    const double eta = -2.0 * beta_t;
    auto f = [w, eta, beta](double tau) {
        return 0.5 * tau * tau - softplus(beta * (w * tau + eta));
    };
    auto f_prime = [w, eta, beta](double tau) {
        return tau - beta * w * sigmoid(beta * (w * tau + eta));
    };
    FreeEnergyCurve curve;
    curve.m = m_grid;
    curve.value.reserve(m_grid.size());
    for (double tau : m_grid) curve.value.push_back(f(tau));
    locate_minima(curve, f, f_prime);
    for (const CurveMinimum& mm : curve.minima) {
        // flag stationarity failures of the refined minima
        const double resid = mm.m - beta * w * sigmoid(beta * (w * mm.m + eta));
        if (std::abs(resid) > 1e-6)
            throw std::runtime_error("toy_rbm_free_energy: self-consistency failed at m_tau = " +
                                     std::to_string(mm.m));
    }
    return curve;
}

BranchGap toy_rbm_branch_gap(double beta_t, double beta, const Vec& m_grid) {
    const FreeEnergyCurve curve = toy_rbm_free_energy(beta_t, beta, m_grid);
    BranchGap out;
    if (curve.minima.empty()) return out;
    const auto lo = std::min_element(curve.minima.begin(), curve.minima.end(),
                                     [](const CurveMinimum& a, const CurveMinimum& b) {
                                         return a.m < b.m;
                                     });
    const auto hi = std::max_element(curve.minima.begin(), curve.minima.end(),
                                     [](const CurveMinimum& a, const CurveMinimum& b) {
                                         return a.m < b.m;
                                     });
    out.m_low = lo->m;
    out.m_high = hi->m;
    if (curve.minima.size() >= 2 && hi->m - lo->m > 1e-6) {
        out.both_present = true;
        out.gap = hi->value - lo->value;
    }
    return out;
}

}  // namespace rbm
