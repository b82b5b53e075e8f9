#include "rbm/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbm/exact.hpp"
#include "rbm/train.hpp"

namespace rbm {

void AisSchedule::validate() const {
    if (walkers < 1) throw std::invalid_argument("AisSchedule: need at least one walker");
    if (mcmc_steps < 1) throw std::invalid_argument("AisSchedule: mcmc steps must be >= 1");
    if (kind == ScheduleKind::Trajectory) {
        if (checkpoints.empty()) throw std::invalid_argument("AisSchedule: empty checkpoint list");
        for (std::size_t i = 1; i < checkpoints.size(); ++i)
            if (checkpoints[i].update_index < checkpoints[i - 1].update_index)
                throw std::invalid_argument("AisSchedule: checkpoints must be time-ordered");
    } else {
        if (betas.empty()) throw std::invalid_argument("AisSchedule: empty beta list");
        if (std::abs(betas.front()) > 1e-12 || std::abs(betas.back() - 1.0) > 1e-12)
            throw std::invalid_argument("AisSchedule: betas must run from 0 to 1");
        for (std::size_t i = 1; i < betas.size(); ++i)
            if (betas[i] <= betas[i - 1])
                throw std::invalid_argument("AisSchedule: betas must be ascending");
    }
}

namespace {

double factorized_log_z(const RbmModel& m) {
    double z = 0.0;
    if (m.conv == Convention::ZeroOne) {
        for (double t : m.vbias) z += softplus(t);
        for (double e : m.hbias) z += softplus(e);
    } else {
        for (double t : m.vbias) z += log2cosh(t);
        for (double e : m.hbias) z += log2cosh(e);
    }
    return z;
}

Configuration factorized_draw(const RbmModel& m, RngStream& rng) {
    Configuration x;
    x.v.assign(std::size_t(m.nv()), 0);
    x.h.assign(std::size_t(m.nh()), 0);
    const std::int8_t up = std::int8_t(spin_up(m.conv));
    const std::int8_t down = std::int8_t(spin_down(m.conv));
    for (int i = 0; i < m.nv(); ++i)
        x.v[std::size_t(i)] = rng.bernoulli(unit_prob_up(m.vbias[i], m.conv)) ? up : down;
    for (int a = 0; a < m.nh(); ++a)
        x.h[std::size_t(a)] = rng.bernoulli(unit_prob_up(m.hbias[a], m.conv)) ? up : down;
    return x;
}

bool is_factorized(const RbmModel& m) {
    for (double w : m.w.a)
        if (w != 0.0) return false;
    return true;
}

double jackknife_stderr(const Vec& a) {
    const int n = int(a.size());
    if (n < 2) return 0.0;
    const double full = logsumexp(a);
    Vec loo(std::size_t(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const double se = std::exp(a[std::size_t(j)] - full);
        if (se > 1.0 - 1e-12) {
            Vec rest;
            rest.reserve(std::size_t(n) - 1);
            for (int i = 0; i < n; ++i)
                if (i != j) rest.push_back(a[std::size_t(i)]);
            loo[std::size_t(j)] = logsumexp(rest) - std::log(double(n - 1));
        } else {
            loo[std::size_t(j)] = full + std::log1p(-se) - std::log(double(n - 1));
        }
    }
    double mean = 0.0;
    for (double x : loo) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : loo) var += (x - mean) * (x - mean);
    return std::sqrt(var * double(n - 1) / double(n));
}

}  // namespace

AisResult ais_estimate(const RbmModel& target, const AisSchedule& schedule, std::uint64_t seed,
                       const RbmModel* reference, std::optional<RcmHead> head) {
    schedule.validate();
    target.validate();

    std::vector<RbmModel> path;
    double log_z0 = 0.0;
    Vec head_cum;  // exact visible table of an enumerable, non-factorized head
    if (schedule.kind == ScheduleKind::Trajectory) {
        path = schedule.checkpoints;
        log_z0 = schedule.head_log_z;
        if (!head && !is_factorized(path.front())) {
            if (path.front().nv() <= 20) {
                const Vec table = exact_visible_distribution(path.front());
                head_cum.resize(table.size());
                double acc = 0.0;
                for (std::size_t i = 0; i < table.size(); ++i) {
                    acc += table[i];
                    head_cum[i] = acc;
                }
                head_cum.back() = 1.0;
            } else {
                throw std::invalid_argument(
                    "ais_estimate: trajectory head must be factorized, enumerable, or carry "
                    "an RCM sampler");
            }
        }
    } else if (schedule.kind == ScheduleKind::TemperatureReference) {
        if (!reference)
            throw std::invalid_argument("ais_estimate: reference schedule without a reference");
        path = tempered_ladder(target, schedule.betas, reference);
        log_z0 = factorized_log_z(path.front());
    } else {
        path = tempered_ladder(target, schedule.betas);
        log_z0 = (target.nv() + target.nh()) * std::log(2.0);
    }

    const int n = int(path.size());
    const int walkers = schedule.walkers;
    Vec acc(std::size_t(walkers), 0.0);
    parallel_for(walkers, [&](int w) {
        RngStream rng(seed, 0xA15 * 1024 + std::uint64_t(w));
        const RbmModel& base = path.front();
        Configuration x;
        if (head) {
            x.v = convert_state(static_sample_one(*head->mesh, *head->pca, rng),
                                Convention::PlusMinus, base.conv);
        } else if (!head_cum.empty()) {
            const double u = rng.u01();
            std::size_t idx = std::size_t(
                std::lower_bound(head_cum.begin(), head_cum.end(), u) - head_cum.begin());
            if (idx >= head_cum.size()) idx = head_cum.size() - 1;
            x.v.resize(std::size_t(base.nv()));
            const std::int8_t up = std::int8_t(spin_up(base.conv));
            const std::int8_t down = std::int8_t(spin_down(base.conv));
            for (int i = 0; i < base.nv(); ++i)
                x.v[std::size_t(i)] = (idx >> i) & 1 ? up : down;
        } else {
            x = factorized_draw(base, rng);
        }
        if (head || !head_cum.empty()) {
            Vec in;
            hidden_inputs(base, x.v, in);
            const std::int8_t up = std::int8_t(spin_up(base.conv));
            const std::int8_t down = std::int8_t(spin_down(base.conv));
            x.h.resize(std::size_t(base.nh()));
            for (int a = 0; a < base.nh(); ++a)
                x.h[std::size_t(a)] =
                    rng.bernoulli(unit_prob_up(in[a], base.conv)) ? up : down;
        }
        double a = 0.0;
        for (int i = 1; i < n; ++i) {
            a += energy(path[std::size_t(i)], x) - energy(path[std::size_t(i - 1)], x);
            if (i < n - 1) ags_step_one(path[std::size_t(i)], x, rng, schedule.mcmc_steps);
        }
        acc[std::size_t(w)] = -a;
    });

    AisResult out;
    out.log_z = log_z0 + logsumexp(acc) - std::log(double(walkers));
    out.stderr_jackknife = n == 1 ? 0.0 : jackknife_stderr(acc);
    return out;
}

SteppingStone ptt_log_likelihood(const std::vector<RbmModel>& ladder,
                                 const std::vector<std::vector<Configuration>>& rung_samples,
                                 double head_log_z, const std::vector<State>& train_rows,
                                 const std::vector<State>& test_rows) {
    if (ladder.empty()) throw std::invalid_argument("ptt_log_likelihood: empty ladder");
    if (rung_samples.size() != ladder.size())
        throw std::invalid_argument("ptt_log_likelihood: rung sample count mismatch");

    SteppingStone out;
    out.log_z.assign(ladder.size(), 0.0);
    out.log_z[0] = head_log_z;
    for (std::size_t t = 1; t < ladder.size(); ++t) {
        const auto& probes = rung_samples[t - 1];
        if (probes.empty())
            throw std::invalid_argument("ptt_log_likelihood: no samples at rung " +
                                        std::to_string(t - 1));
        if (probes.size() < 100) out.high_variance = true;
        Vec terms(probes.size(), 0.0);
        parallel_for(int(probes.size()), [&](int i) {
            terms[std::size_t(i)] = -(energy(ladder[t], probes[std::size_t(i)]) -
                                      energy(ladder[t - 1], probes[std::size_t(i)]));
        });
        out.log_z[t] = out.log_z[t - 1] + logsumexp(terms) - std::log(double(terms.size()));
    }

    auto mean_neg_energy = [](const RbmModel& m, const std::vector<State>& rows) {
        double s = 0.0;
        for (const State& v : rows) s -= marginal_energy(m, v);
        return s / double(rows.size());
    };
    if (!train_rows.empty()) {
        out.ll_train.resize(ladder.size());
        for (std::size_t t = 0; t < ladder.size(); ++t)
            out.ll_train[t] = mean_neg_energy(ladder[t], train_rows) - out.log_z[t];
    }
    if (!test_rows.empty()) {
        out.ll_test.resize(ladder.size());
        for (std::size_t t = 0; t < ladder.size(); ++t)
            out.ll_test[t] = mean_neg_energy(ladder[t], test_rows) - out.log_z[t];
    }
    return out;
}

double independent_sites_baseline(const std::vector<State>& rows, Convention conv) {
    if (rows.empty()) throw std::invalid_argument("independent_sites_baseline: empty dataset");
    const int nv = int(rows[0].size());
    double ll = 0.0;
    for (int i = 0; i < nv; ++i) {
        double up = 0.0;
        for (const State& r : rows) up += r[i] == 1 ? 1.0 : 0.0;
        const double f = up / double(rows.size());
        const double p = std::min(std::max(f, 1e-4), 1.0 - 1e-4);
        ll += f * std::log(p) + (1.0 - f) * std::log(1.0 - p);
    }
    (void)conv;  // the factorized likelihood is convention independent
    return ll;
}

}  // namespace rbm
