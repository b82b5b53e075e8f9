#include "rbm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rbm/exact.hpp"
#include "rbm/rate.hpp"
#include "rbm/rng.hpp"

namespace rbm {

namespace {

void metropolis_sweep(std::vector<std::int8_t>& s, int L, double beta, RngStream& rng) {
    for (int site = 0; site < L * L; ++site) {
        const int r = int(rng.below(std::uint64_t(L)));
        const int c = int(rng.below(std::uint64_t(L)));
        const int idx = r * L + c;
        const int nb = s[((r + 1) % L) * L + c] + s[((r - 1 + L) % L) * L + c] +
                       s[r * L + (c + 1) % L] + s[r * L + (c - 1 + L) % L];
        const double de = 2.0 * s[idx] * nb;  // energy change of flipping, in units of J
        if (de <= 0.0 || rng.u01() < std::exp(-beta * de))
            s[idx] = std::int8_t(-s[idx]);
    }
}

}  // namespace

BinaryDataset gen_ising2d(int L, double beta, int count, int thermalization_sweeps,
                          std::uint64_t seed) {
    if (L < 2) throw std::invalid_argument("gen_ising2d: L must be >= 2");
    RngStream rng(seed, 0x1512);
    std::vector<std::int8_t> s(std::size_t(L) * L);
    for (auto& x : s) x = rng.bernoulli(0.5) ? std::int8_t(1) : std::int8_t(-1);
    for (int t = 0; t < thermalization_sweeps; ++t) metropolis_sweep(s, L, beta, rng);

    const int stride = L * L;
    BinaryDataset d;
    d.conv = Convention::PlusMinus;
    d.rows.reserve(std::size_t(count));
    for (int n = 0; n < count; ++n) {
        for (int t = 0; t < stride; ++t) metropolis_sweep(s, L, beta, rng);
        d.rows.emplace_back(s.begin(), s.end());
    }
    return d;
}

BinaryDataset gen_curie_weiss(int n, double beta, int count, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_curie_weiss: N must be >= 2");
    // log p(k up-spins) = log C(n,k) + beta M^2/(2n), M = 2k - n
    Vec logp(std::size_t(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double m = 2.0 * k - n;
        logp[std::size_t(k)] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                               std::lgamma(n - k + 1.0) + beta * m * m / (2.0 * n);
    }
    const double logz = logsumexp(logp);
    Vec cum(std::size_t(n) + 1);
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        acc += std::exp(logp[std::size_t(k)] - logz);
        cum[std::size_t(k)] = acc;
    }
    cum[std::size_t(n)] = 1.0;

    RngStream rng(seed, 0xC3);
    BinaryDataset d;
    d.conv = Convention::PlusMinus;
    d.rows.reserve(std::size_t(count));
    std::vector<int> order(n);
    for (int s = 0; s < count; ++s) {
        const double u = rng.u01();
        int k = int(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (k > n) k = n;
        std::iota(order.begin(), order.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(order[i], order[rng.below(std::uint64_t(i) + 1)]);
        State row(n, std::int8_t(-1));
        for (int i = 0; i < k; ++i) row[order[i]] = 1;
        d.rows.push_back(std::move(row));
    }
    return d;
}

BinaryDataset gen_clustered(const std::vector<ClusterSpec>& spec, int count, int nv,
                            std::uint64_t seed, Convention conv) {
    if (spec.empty()) throw std::invalid_argument("gen_clustered: empty cluster spec");
    const int d = int(spec[0].center.size());
    double wsum = 0.0;
    for (const auto& c : spec) {
        if (int(c.center.size()) != d)
            throw std::invalid_argument("gen_clustered: inconsistent center dimensions");
        if (!c.radii.empty() && int(c.radii.size()) != d)
            throw std::invalid_argument("gen_clustered: radii/center dimension mismatch");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("gen_clustered: cluster weights must sum to 1");

    // Random orthonormal embedding of the latent plane (Gram-Schmidt on
    // Gaussian vectors).
    RngStream rng(seed, 0xE0BED);
    Mat basis(d, nv);
    for (int k = 0; k < d; ++k) {
        for (int i = 0; i < nv; ++i) basis(k, i) = rng.normal();
        for (int l = 0; l < k; ++l) {
            double p = 0.0;
            for (int i = 0; i < nv; ++i) p += basis(k, i) * basis(l, i);
            for (int i = 0; i < nv; ++i) basis(k, i) -= p * basis(l, i);
        }
        double norm = 0.0;
        for (int i = 0; i < nv; ++i) norm += basis(k, i) * basis(k, i);
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw std::runtime_error("gen_clustered: degenerate embedding");
        for (int i = 0; i < nv; ++i) basis(k, i) /= norm;
    }

    Vec cum(spec.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        acc += spec[k].weight;
        cum[k] = acc;
    }
    cum.back() = 1.0;

    const double root = std::sqrt(double(nv));
    BinaryDataset out;
    out.conv = Convention::PlusMinus;
    out.rows.reserve(std::size_t(count));
    out.labels.reserve(std::size_t(count));
    Vec m(d), warm(d, 0.0);
    for (int s = 0; s < count; ++s) {
        const double u = rng.u01();
        const int k =
            int(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        MuStarResult mu;
        for (int attempt = 0; attempt < 100; ++attempt) {
            for (int a = 0; a < d; ++a) {
                const double r = spec[k].radii.empty() ? spec[k].radius
                                                       : spec[k].radii[std::size_t(a)];
                m[a] = spec[k].center[a] + r * rng.normal();
            }
            mu = solve_mu_star(basis, m, &warm);
            if (mu.converged) break;
        }
        if (!mu.converged)
            throw std::runtime_error("gen_clustered: latent point outside the achievable set");
        warm = mu.mu;
        State row(nv);
        for (int i = 0; i < nv; ++i) {
            double tilt = 0.0;
            for (int a = 0; a < d; ++a) tilt += basis(a, i) * mu.mu[a];
            row[i] =
                rng.bernoulli(sigmoid(2.0 * root * tilt)) ? std::int8_t(1) : std::int8_t(-1);
        }
        out.rows.push_back(std::move(row));
        out.labels.push_back(k);
    }
    if (conv != Convention::PlusMinus) {
        for (auto& r : out.rows) r = convert_state(r, Convention::PlusMinus, conv);
        out.conv = conv;
    }
    return out;
}

}  // namespace rbm
