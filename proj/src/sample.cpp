#include "rbm/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbm/exact.hpp"

namespace rbm {

bool swap_attempt(const RbmModel& model_t, const RbmModel& model_tm1, Configuration& x_t,
                  Configuration& x_tm1, RngStream& rng) {
    if (model_t.nv() != model_tm1.nv() || model_t.nh() != model_tm1.nh() ||
        model_t.conv != model_tm1.conv)
        throw std::invalid_argument("swap_attempt: incompatible models");
    const double dh_high = energy(model_t, x_t) - energy(model_tm1, x_t);
    const double dh_low = energy(model_t, x_tm1) - energy(model_tm1, x_tm1);
    const double log_acc = dh_high - dh_low;
    if (log_acc >= 0.0 || rng.u01() < std::exp(log_acc)) {
        std::swap(x_t, x_tm1);
        return true;
    }
    return false;
}

namespace {

void check_ladder(const std::vector<RbmModel>& ladder) {
    if (ladder.empty()) throw std::invalid_argument("empty model ladder");
    for (const RbmModel& m : ladder)
        if (m.nv() != ladder[0].nv() || m.nh() != ladder[0].nh() || m.conv != ladder[0].conv)
            throw std::invalid_argument("ladder models have mixed shapes or conventions");
}

Configuration draw_static(const MagnetizationMesh& mesh, const PcaBasis& pca,
                          const RbmModel& head_model, RngStream& rng) {
    Configuration x;
    x.v = static_sample_one(mesh, pca, rng);
    Vec in;
    hidden_inputs(head_model, x.v, in);
    x.h.resize(std::size_t(head_model.nh()));
    for (int a = 0; a < head_model.nh(); ++a)
        x.h[std::size_t(a)] =
            rng.bernoulli(unit_prob_up(in[a], head_model.conv)) ? std::int8_t(1) : std::int8_t(-1);
    return x;
}

}  // namespace

LadderRunResult ptt_run(const std::vector<RbmModel>& ladder, const LadderRunOptions& opt,
                        std::optional<RcmHead> head) {
    check_ladder(ladder);
    const int nm = int(ladder.size());
    const int r = opt.chain_count;
    if (head && (head->mesh == nullptr || head->pca == nullptr))
        throw std::invalid_argument("ptt_run: incomplete RCM head");
    if (head && ladder[0].conv != Convention::PlusMinus)
        throw std::invalid_argument("ptt_run: RCM head requires a +-1 ladder");

    // per-model chain populations with disjoint stream ids; slot streams for
    // swaps and head refreshes sit past the model blocks
    std::vector<std::vector<Configuration>> chains{std::size_t(nm)};
    std::vector<std::vector<RngStream>> rng{std::size_t(nm)};
    for (int j = 0; j < nm; ++j) {
        rng[std::size_t(j)].reserve(std::size_t(r));
        for (int c = 0; c < r; ++c)
            rng[std::size_t(j)].emplace_back(opt.seed, std::uint64_t(j) * r + std::uint64_t(c));
    }
    std::vector<RngStream> swap_rng, head_rng;
    for (int c = 0; c < r; ++c) {
        swap_rng.emplace_back(opt.seed, std::uint64_t(nm) * r + std::uint64_t(c));
        head_rng.emplace_back(opt.seed, std::uint64_t(nm + 1) * r + std::uint64_t(c));
    }

    // initialization: head draw (or uniform) cascaded up the ladder
    const std::int8_t up = std::int8_t(spin_up(ladder[0].conv));
    const std::int8_t down = std::int8_t(spin_down(ladder[0].conv));
    chains[0].resize(std::size_t(r));
    parallel_for(r, [&](int c) {
        if (head) {
            chains[0][std::size_t(c)] = draw_static(*head->mesh, *head->pca, ladder[0], head_rng[std::size_t(c)]);
        } else {
            Configuration& x = chains[0][std::size_t(c)];
            x.v.resize(std::size_t(ladder[0].nv()));
            x.h.resize(std::size_t(ladder[0].nh()));
            for (auto& s : x.v) s = rng[0][std::size_t(c)].bernoulli(0.5) ? up : down;
            for (auto& s : x.h) s = rng[0][std::size_t(c)].bernoulli(0.5) ? up : down;
        }
    });
    for (int j = 1; j < nm; ++j) {
        chains[std::size_t(j)] = chains[std::size_t(j - 1)];
        parallel_for(r, [&](int c) {
            ags_step_one(ladder[std::size_t(j)], chains[std::size_t(j)][std::size_t(c)],
                         rng[std::size_t(j)][std::size_t(c)], opt.init_gibbs_steps);
        });
    }

    LadderRunResult out;
    out.pair_acceptance.assign(std::size_t(std::max(nm - 1, 0)), 0.0);
    out.pair_attempts.assign(std::size_t(std::max(nm - 1, 0)), 0);
    if (opt.collect_all_models) out.rung_samples.resize(std::size_t(nm));
    if (opt.record_history) {
        out.visit_history.assign(std::size_t(nm),
                                 std::vector<std::vector<std::int16_t>>(std::size_t(r)));
        for (auto& g : out.visit_history)
            for (auto& h : g) h.reserve(std::size_t(opt.sweeps));
    }
    // perm[c][j] = start index of the replica currently at model j in slot c
    std::vector<std::vector<std::int16_t>> perm(std::size_t(r), std::vector<std::int16_t>(std::size_t(nm), 0));
    for (int c = 0; c < r; ++c)
        for (int j = 0; j < nm; ++j) perm[std::size_t(c)][std::size_t(j)] = std::int16_t(j);

    for (int sweep = 1; sweep <= opt.sweeps; ++sweep) {
        // advance every model; a fresh static draw replaces the head state
        parallel_for(r, [&](int c) {
            if (head) chains[0][std::size_t(c)] = draw_static(*head->mesh, *head->pca, ladder[0], head_rng[std::size_t(c)]);
        });
        for (int j = head ? 1 : 0; j < nm; ++j)
            parallel_for(r, [&](int c) {
                ags_step_one(ladder[std::size_t(j)], chains[std::size_t(j)][std::size_t(c)],
                             rng[std::size_t(j)][std::size_t(c)], opt.gibbs_steps);
            });

        // swap phase: adjacent pairs, low to high
        std::vector<long> accepted(std::size_t(std::max(nm - 1, 0)), 0);
        for (int j = 0; j + 1 < nm; ++j) {
            long acc = 0;
            for (int c = 0; c < r; ++c) {
                if (swap_attempt(ladder[std::size_t(j + 1)], ladder[std::size_t(j)],
                                 chains[std::size_t(j + 1)][std::size_t(c)],
                                 chains[std::size_t(j)][std::size_t(c)],
                                 swap_rng[std::size_t(c)])) {
                    ++acc;
                    std::swap(perm[std::size_t(c)][std::size_t(j)],
                              perm[std::size_t(c)][std::size_t(j + 1)]);
                }
            }
            accepted[std::size_t(j)] = acc;
        }
        for (int j = 0; j + 1 < nm; ++j) {
            out.pair_acceptance[std::size_t(j)] += double(accepted[std::size_t(j)]);
            out.pair_attempts[std::size_t(j)] += r;
        }

        if (opt.record_history)
            for (int c = 0; c < r; ++c)
                for (int j = 0; j < nm; ++j)
                    out.visit_history[std::size_t(perm[std::size_t(c)][std::size_t(j)])]
                        [std::size_t(c)].push_back(std::int16_t(j));

        if (sweep % opt.sample_stride == 0) {
            for (int c = 0; c < r; ++c)
                out.target_samples.push_back(chains[std::size_t(nm - 1)][std::size_t(c)].v);
            if (opt.collect_all_models)
                for (int j = 0; j < nm; ++j)
                    for (int c = 0; c < r; ++c)
                        out.rung_samples[std::size_t(j)].push_back(chains[std::size_t(j)][std::size_t(c)]);
        }
    }

    for (std::size_t j = 0; j + 1 < std::size_t(nm); ++j)
        if (out.pair_attempts[j] > 0) out.pair_acceptance[j] /= double(out.pair_attempts[j]);
    return out;
}

std::vector<RbmModel> tempered_ladder(const RbmModel& model, const Vec& betas,
                                      const RbmModel* reference) {
    if (betas.empty()) throw std::invalid_argument("tempered_ladder: empty beta list");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (betas[i] <= betas[i - 1])
            throw std::invalid_argument("tempered_ladder: betas must be ascending");
    if (std::abs(betas.back() - 1.0) > 1e-12)
        throw std::invalid_argument("tempered_ladder: last beta must be 1");
    if (reference) {
        if (reference->nv() != model.nv() || reference->nh() != model.nh() ||
            reference->conv != model.conv)
            throw std::invalid_argument("tempered_ladder: reference model mismatch");
        for (double w : reference->w.a)
            if (w != 0.0)
                throw std::invalid_argument("tempered_ladder: reference must be factorized");
    }

    std::vector<RbmModel> ladder;
    ladder.reserve(betas.size());
    for (double beta : betas) {
        RbmModel m = model;
        for (double& x : m.w.a) x *= beta;
        for (int i = 0; i < m.nv(); ++i)
            m.vbias[i] =
                beta * model.vbias[i] + (reference ? (1.0 - beta) * reference->vbias[i] : 0.0);
        for (int a = 0; a < m.nh(); ++a)
            m.hbias[a] =
                beta * model.hbias[a] + (reference ? (1.0 - beta) * reference->hbias[a] : 0.0);
        ladder.push_back(std::move(m));
    }
    return ladder;
}

LadderRunResult pt_run(const RbmModel& model, const Vec& betas, const LadderRunOptions& opt,
                       const RbmModel* reference) {
    return ptt_run(tempered_ladder(model, betas, reference), opt);
}

namespace {

std::vector<Configuration> probe_states(const RbmModel& m, int count, int burnin,
                                        std::uint64_t seed, const std::optional<RcmHead>& head,
                                        bool is_head_model) {
    std::vector<Configuration> out{std::size_t(count)};
    parallel_for(count, [&](int c) {
        RngStream rng(seed, 0xBEEF00 + std::uint64_t(c));
        if (head && is_head_model) {
            out[std::size_t(c)] = draw_static(*head->mesh, *head->pca, m, rng);
        } else {
            Configuration x;
            const std::int8_t up = std::int8_t(spin_up(m.conv));
            const std::int8_t down = std::int8_t(spin_down(m.conv));
            x.v.assign(std::size_t(m.nv()), 0);
            x.h.assign(std::size_t(m.nh()), 0);
            for (auto& s : x.v) s = rng.bernoulli(0.5) ? up : down;
            for (auto& s : x.h) s = rng.bernoulli(0.5) ? up : down;
            ags_step_one(m, x, rng, burnin);
            out[std::size_t(c)] = std::move(x);
        }
    });
    return out;
}

double pair_acceptance_estimate(const RbmModel& later, const RbmModel& earlier,
                                const std::vector<Configuration>& probes) {
    // Probes come from the earlier model; the later-model slot of the exchange
    // pair is served by the same probes importance-reweighted with
    // p_later/p_earlier = exp(-dH).
    const int n = int(probes.size());
    Vec dh(std::size_t(n), 0.0);
    parallel_for(n, [&](int i) {
        dh[std::size_t(i)] = energy(later, probes[std::size_t(i)]) -
                             energy(earlier, probes[std::size_t(i)]);
    });
    Vec neg(dh);
    for (double& x : neg) x = -x;
    const double lse = logsumexp(neg);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double wi = std::exp(-dh[std::size_t(i)] - lse);  // later-side weight
        if (wi == 0.0) continue;
        const double la = dh[std::size_t(i)] - dh[std::size_t((i + 1) % n)];
        acc += wi * (la >= 0.0 ? 1.0 : std::exp(la));
    }
    return acc;
}

}  // namespace

LadderSelection select_ladder(const std::vector<RbmModel>& trajectory, double target_acceptance,
                              int probe_samples, int probe_burnin, std::uint64_t seed,
                              std::optional<RcmHead> head) {
    if (trajectory.size() < 2)
        throw std::invalid_argument("select_ladder: need at least two checkpoints");
    check_ladder(trajectory);
    const int last = int(trajectory.size()) - 1;

    LadderSelection sel;
    sel.indices.push_back(0);
    int i = 0;
    while (i < last) {
        const auto probes =
            probe_states(trajectory[std::size_t(i)], probe_samples, probe_burnin,
                         seed + std::uint64_t(i), head, i == 0);
        int chosen = i + 1;
        double chosen_acc =
            pair_acceptance_estimate(trajectory[std::size_t(i + 1)], trajectory[std::size_t(i)], probes);
        if (chosen_acc < target_acceptance) sel.all_pairs_reached_target = false;
        for (int j = i + 2; j <= last; ++j) {
            const double acc =
                pair_acceptance_estimate(trajectory[std::size_t(j)], trajectory[std::size_t(i)], probes);
            if (acc < target_acceptance) break;
            chosen = j;
            chosen_acc = acc;
        }
        sel.indices.push_back(chosen);
        sel.measured_acceptance.push_back(chosen_acc);
        i = chosen;
    }
    return sel;
}

AutocorrelationResult index_autocorrelation(
    const std::vector<std::vector<std::vector<std::int16_t>>>& histories, int ladder_size) {
    if (ladder_size < 1) throw std::invalid_argument("index_autocorrelation: empty ladder");
    const double nbar = 0.5 * (ladder_size - 1);

    std::size_t t_len = 0;
    double emp_mean = 0.0, emp_sq = 0.0;
    long count = 0;
    for (const auto& g : histories)
        for (const auto& h : g) {
            if (h.empty()) continue;
            t_len = t_len == 0 ? h.size() : std::min(t_len, h.size());
            for (std::int16_t n : h) {
                emp_mean += n;
                emp_sq += double(n) * n;
                ++count;
            }
        }
    if (count == 0 || t_len < 2) throw std::invalid_argument("index_autocorrelation: no history");
    emp_mean /= double(count);
    emp_sq = emp_sq / double(count) - emp_mean * emp_mean;
    if (emp_sq <= 0.0)
        throw std::runtime_error("index_autocorrelation: non-ergodic run (chains never move)");

    const int ngroups = int(histories.size());
    auto group_curve = [&](int g, int lagmax) {
        Vec num(std::size_t(lagmax) + 1, 0.0);
        std::vector<long> cnt(std::size_t(lagmax) + 1, 0);
        for (const auto& h : histories[std::size_t(g)]) {
            const int t = int(std::min(t_len, h.size()));
            for (int lag = 0; lag <= lagmax; ++lag)
                for (int t0 = 0; t0 + lag < t; ++t0) {
                    num[std::size_t(lag)] +=
                        (h[std::size_t(t0)] - nbar) * (h[std::size_t(t0 + lag)] - nbar);
                    ++cnt[std::size_t(lag)];
                }
        }
        Vec c(std::size_t(lagmax) + 1, 0.0);
        const double c0 = cnt[0] > 0 ? num[0] / double(cnt[0]) : 0.0;
        for (int lag = 0; lag <= lagmax; ++lag)
            c[std::size_t(lag)] = (c0 > 0.0 && cnt[std::size_t(lag)] > 0)
                                      ? (num[std::size_t(lag)] / double(cnt[std::size_t(lag)])) / c0
                                      : 0.0;
        return c;
    };

    auto tau_int_of = [&](const Vec& c) {
        double tau = 0.5;
        for (int it = 0; it < 200; ++it) {
            const int w = std::min(int(c.size()) - 1, int(std::ceil(6.0 * tau)));
            double next = 0.5;
            for (int t = 1; t <= w; ++t) next += c[std::size_t(t)];
            if (std::abs(next - tau) < 1e-12) return next;
            tau = next;
        }
        return tau;
    };

    struct Fit {
        double tau = 0.0;
        int lo = 0, hi = 0;
        bool ok = false;
    };
    auto tau_exp_of = [&](const Vec& c) {
        Fit f;
        std::vector<int> window;
        for (int t = 1; t < int(c.size()); ++t)
            if (c[std::size_t(t)] >= 0.05 && c[std::size_t(t)] <= 0.5) window.push_back(t);
        if (window.size() < 2) return f;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int t : window) {
            const double y = std::log(c[std::size_t(t)]);
            sx += t;
            sy += y;
            sxx += double(t) * t;
            sxy += t * y;
        }
        const double n = double(window.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (slope >= 0.0) return f;
        f.tau = -1.0 / slope;
        f.lo = window.front();
        f.hi = window.back();
        f.ok = true;
        return f;
    };

    // adaptive lag window: extend until it comfortably covers 6 tau_int
    int lagmax = std::min<int>(64, int(t_len) - 1);
    Vec mean_c;
    for (;;) {
        Mat percurve(ngroups, lagmax + 1);
        for (int g = 0; g < ngroups; ++g) {
            const Vec cg = group_curve(g, lagmax);
            for (int t = 0; t <= lagmax; ++t) percurve(g, t) = cg[std::size_t(t)];
        }
        mean_c.assign(std::size_t(lagmax) + 1, 0.0);
        for (int t = 0; t <= lagmax; ++t) {
            for (int g = 0; g < ngroups; ++g) mean_c[std::size_t(t)] += percurve(g, t);
            mean_c[std::size_t(t)] /= ngroups;
        }
        const double tau = tau_int_of(mean_c);
        if (6.0 * tau <= 0.8 * lagmax || lagmax >= int(t_len) - 1) {
            AutocorrelationResult out;
            out.c = mean_c;
            out.c_err.assign(mean_c.size(), 0.0);
            if (ngroups > 1)
                for (int t = 0; t <= lagmax; ++t) {
                    double var = 0.0;
                    for (int g = 0; g < ngroups; ++g) {
                        const double d = percurve(g, t) - mean_c[std::size_t(t)];
                        var += d * d;
                    }
                    out.c_err[std::size_t(t)] =
                        std::sqrt(var / (double(ngroups) * (ngroups - 1)));
                }
            out.tau_int = tau;
            const Fit f = tau_exp_of(mean_c);
            out.tau_exp = f.ok ? f.tau : 0.0;
            out.fit_lo = f.lo;
            out.fit_hi = f.hi;

            // spread of the per-group extractions
            Vec tis, tes;
            for (int g = 0; g < ngroups; ++g) {
                Vec cg(std::size_t(lagmax) + 1);
                for (int t = 0; t <= lagmax; ++t) cg[std::size_t(t)] = percurve(g, t);
                tis.push_back(tau_int_of(cg));
                const Fit fg = tau_exp_of(cg);
                if (fg.ok) tes.push_back(fg.tau);
            }
            auto spread = [](const Vec& xs) {
                if (xs.size() < 2) return 0.0;
                double m = 0.0;
                for (double x : xs) m += x;
                m /= double(xs.size());
                double v = 0.0;
                for (double x : xs) v += (x - m) * (x - m);
                return std::sqrt(v / (double(xs.size()) * (xs.size() - 1)));
            };
            out.tau_int_err = spread(tis);
            out.tau_exp_err = spread(tes);
            out.thermalized = double(t_len) >= 20.0 * out.tau_exp;
            return out;
        }
        lagmax = std::min(int(t_len) - 1, lagmax * 4);
    }
}

}  // namespace rbm
