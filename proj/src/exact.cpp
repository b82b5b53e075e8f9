#include "rbm/exact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbm {

double logsumexp(const Vec& x) {
    if (x.empty()) return -std::numeric_limits<double>::infinity();
    double m = x[0];
    for (double v : x) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<State> enumerate_states(int n, Convention c) {
    if (n > kEnumerationCap) throw std::invalid_argument("enumerate_states: layer too large");
    const std::int8_t up = std::int8_t(spin_up(c));
    const std::int8_t down = std::int8_t(spin_down(c));
    std::vector<State> out;
    out.reserve(std::size_t(1) << n);
    for (std::uint32_t code = 0; code < (std::uint32_t(1) << n); ++code) {
        State s(n);
        for (int j = 0; j < n; ++j) s[j] = (code >> j) & 1 ? up : down;
        out.push_back(std::move(s));
    }
    return out;
}

double exact_log_partition(const RbmModel& m) {
    m.validate();
    const bool by_hidden = m.nh() <= m.nv();
    const int n = by_hidden ? m.nh() : m.nv();
    if (n > kEnumerationCap)
        throw std::invalid_argument(
            "exact_log_partition: both layers exceed the enumeration cap of 25 units");
    Vec terms;
    terms.reserve(std::size_t(1) << n);
    for (const State& s : enumerate_states(n, m.conv))
        terms.push_back(by_hidden ? -hidden_marginal_energy(m, s) : -marginal_energy(m, s));
    return logsumexp(terms);
}

double exact_log_likelihood(const RbmModel& m, const std::vector<State>& rows) {
    if (rows.empty()) throw std::invalid_argument("exact_log_likelihood: empty dataset");
    const double logz = exact_log_partition(m);
    double s = 0.0;
    for (const State& v : rows) s -= marginal_energy(m, v);
    return s / double(rows.size()) - logz;
}

ModelMoments exact_model_moments(const RbmModel& m) {
    const int nv = m.nv(), nh = m.nh();
    const bool by_hidden = nh <= nv;
    const int n = by_hidden ? nh : nv;
    if (n > kEnumerationCap)
        throw std::invalid_argument("exact_model_moments: enumeration cap exceeded");

    const auto states = enumerate_states(n, m.conv);
    Vec logp(states.size());
    for (std::size_t k = 0; k < states.size(); ++k)
        logp[k] = by_hidden ? -hidden_marginal_energy(m, states[k])
                            : -marginal_energy(m, states[k]);
    const double logz = logsumexp(logp);

    ModelMoments mom;
    mom.vh = Mat(nh, nv, 0.0);
    mom.v.assign(nv, 0.0);
    mom.h.assign(nh, 0.0);
    Vec in;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const double p = std::exp(logp[k] - logz);
        const State& s = states[k];
        if (by_hidden) {
            visible_inputs(m, s, in);
            for (int i = 0; i < nv; ++i) {
                const double vm = unit_mean(in[i], m.conv);
                mom.v[i] += p * vm;
                for (int a = 0; a < nh; ++a) mom.vh(a, i) += p * vm * s[a];
            }
            for (int a = 0; a < nh; ++a) mom.h[a] += p * s[a];
        } else {
            hidden_inputs(m, s, in);
            for (int a = 0; a < nh; ++a) {
                const double hm = unit_mean(in[a], m.conv);
                mom.h[a] += p * hm;
                for (int i = 0; i < nv; ++i) mom.vh(a, i) += p * hm * s[i];
            }
            for (int i = 0; i < nv; ++i) mom.v[i] += p * s[i];
        }
    }
    return mom;
}

Vec exact_visible_distribution(const RbmModel& m) {
    if (m.nv() > kEnumerationCap)
        throw std::invalid_argument("exact_visible_distribution: visible layer too large");
    const double logz = exact_log_partition(m);
    Vec p;
    p.reserve(std::size_t(1) << m.nv());
    for (const State& v : enumerate_states(m.nv(), m.conv))
        p.push_back(std::exp(-marginal_energy(m, v) - logz));
    return p;
}

}  // namespace rbm
