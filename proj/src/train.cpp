#include "rbm/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rbm/exact.hpp"

namespace fs = std::filesystem;

namespace rbm {

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw std::invalid_argument("TrainConfig: negative learning rate");
    if (batch_size < 1 || chain_count < 1 || gibbs_steps < 1 || total_updates < 0)
        throw std::invalid_argument("TrainConfig: counts must be positive");
    if (!(ladder_acceptance_target > 0.0 && ladder_acceptance_target < 1.0))
        throw std::invalid_argument("TrainConfig: acceptance target must be in (0,1)");
    if (!(ess_threshold > 0.0 && ess_threshold <= 1.0))
        throw std::invalid_argument("TrainConfig: ESS threshold must be in (0,1]");
    if (eval_every < 1) throw std::invalid_argument("TrainConfig: eval interval must be >= 1");
}

Gradient gradient_estimate(const RbmModel& m, const std::vector<State>& minibatch,
                           const ChainPopulation& pop) {
    if (minibatch.empty()) throw std::invalid_argument("gradient_estimate: empty minibatch");
    const int nv = m.nv(), nh = m.nh();
    Gradient g;
    g.w = Mat(nh, nv, 0.0);
    g.vbias.assign(nv, 0.0);
    g.hbias.assign(nh, 0.0);

    // positive phase: exact conditional hidden means given the data rows
    Vec in;
    const double invb = 1.0 / double(minibatch.size());
    for (const State& v : minibatch) {
        hidden_inputs(m, v, in);
        for (int a = 0; a < nh; ++a) {
            const double hm = unit_mean(in[a], m.conv) * invb;
            g.hbias[a] += hm;
            double* gw = g.w.row(a);
            for (int i = 0; i < nv; ++i) gw[i] += hm * v[i];
        }
        for (int i = 0; i < nv; ++i) g.vbias[i] += v[i] * invb;
    }

    // negative phase: chain states under their normalized importance weights
    Vec w(pop.log_weight);
    const double lse = logsumexp(w);
    for (double& x : w) x = std::exp(x - lse);
    for (int r = 0; r < pop.size(); ++r) {
        const Configuration& x = pop.chains[r];
        const double wr = w[std::size_t(r)];
        if (wr == 0.0) continue;
        for (int a = 0; a < nh; ++a) {
            if (x.h[a] == 0) continue;
            const double ha = wr * x.h[a];
            g.hbias[a] -= ha;
            double* gw = g.w.row(a);
            for (int i = 0; i < nv; ++i) gw[i] -= ha * x.v[i];
        }
        for (int i = 0; i < nv; ++i) g.vbias[i] -= wr * x.v[i];
    }
    return g;
}

Gradient exact_gradient(const RbmModel& m, const std::vector<State>& rows) {
    if (rows.empty()) throw std::invalid_argument("exact_gradient: empty dataset");
    const int nv = m.nv(), nh = m.nh();
    const ModelMoments mom = exact_model_moments(m);
    Gradient g;
    g.w = Mat(nh, nv, 0.0);
    g.vbias.assign(nv, 0.0);
    g.hbias.assign(nh, 0.0);
    Vec in;
    const double invb = 1.0 / double(rows.size());
    for (const State& v : rows) {
        hidden_inputs(m, v, in);
        for (int a = 0; a < nh; ++a) {
            const double hm = unit_mean(in[a], m.conv) * invb;
            g.hbias[a] += hm;
            double* gw = g.w.row(a);
            for (int i = 0; i < nv; ++i) gw[i] += hm * v[i];
        }
        for (int i = 0; i < nv; ++i) g.vbias[i] += v[i] * invb;
    }
    for (int a = 0; a < nh; ++a) {
        g.hbias[a] -= mom.h[a];
        for (int i = 0; i < nv; ++i) g.w(a, i) -= mom.vh(a, i);
    }
    for (int i = 0; i < nv; ++i) g.vbias[i] -= mom.v[i];
    return g;
}

double TraisState::estimate(const ChainPopulation& pop) const {
    return log_z0 + log_z_offset + logsumexp(pop.log_weight) - std::log(double(pop.size()));
}

double online_trais_update(ChainPopulation& pop, const RbmModel& model_prev,
                           const RbmModel& model_next, TraisState& state) {
    parallel_for(pop.size(), [&](int r) {
        const Configuration& x = pop.chains[r];
        pop.log_weight[std::size_t(r)] -= energy(model_next, x) - energy(model_prev, x);
    });
    return state.estimate(pop);
}

double effective_sample_size(const ChainPopulation& pop) {
    const double lse = logsumexp(pop.log_weight);
    double s2 = 0.0;
    for (double lw : pop.log_weight) {
        const double w = std::exp(lw - lse);
        s2 += w * w;
    }
    return 1.0 / (s2 * double(pop.size()));
}

void resample_population(ChainPopulation& pop, TraisState& state, RngStream& rng) {
    const int r = pop.size();
    const double lse = logsumexp(pop.log_weight);
    Vec cum(std::size_t(r), 0.0);
    double acc = 0.0;
    for (int i = 0; i < r; ++i) {
        acc += std::exp(pop.log_weight[std::size_t(i)] - lse);
        cum[std::size_t(i)] = acc;
    }
    cum.back() = 1.0;
    std::vector<Configuration> next{std::size_t(r)};
    for (int i = 0; i < r; ++i) {
        const double u = rng.u01();
        std::size_t pick = std::size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (pick >= std::size_t(r)) pick = std::size_t(r) - 1;
        next[std::size_t(i)] = pop.chains[pick];
    }
    pop.chains = std::move(next);
    state.log_z_offset += lse - std::log(double(r));
    pop.log_weight.assign(std::size_t(r), 0.0);
}

void jarzynski_step(ChainPopulation& pop, const RbmModel& model_prev,
                    const RbmModel& model_next, double ess_threshold, TraisState& state,
                    RngStream& rng) {
    online_trais_update(pop, model_prev, model_next, state);
    if (effective_sample_size(pop) >= ess_threshold) return;
    resample_population(pop, state, rng);
}

double estimate_swap_acceptance(const RbmModel& current, const RbmModel& saved,
                                const ChainPopulation& pop) {
    // Chains track the current model; the saved-model side of the exchange pair
    // estimate is recovered by importance-reweighting those same states with
    // p_saved/p_current = exp(+dH) up to normalization.
    const int r = pop.size();
    Vec dh(std::size_t(r), 0.0);
    parallel_for(r, [&](int i) {
        dh[std::size_t(i)] = energy(current, pop.chains[i]) - energy(saved, pop.chains[i]);
    });
    const double lse = logsumexp(dh);
    double acc = 0.0;
    for (int i = 0; i < r; ++i) {
        const double wj = std::exp(dh[std::size_t(i)] - lse);  // saved-side weight of chain i
        if (wj == 0.0) continue;
        const int j = (i + 1) % r;  // current-side partner
        const double la = dh[std::size_t(j)] - dh[std::size_t(i)];
        acc += wj * (la >= 0.0 ? 1.0 : std::exp(la));
    }
    return acc;
}

namespace {

double dataset_mean_neg_energy(const RbmModel& m, const std::vector<State>& rows) {
    if (rows.empty()) return 0.0;
    Vec acc(rows.size(), 0.0);
    parallel_for(int(rows.size()), [&](int i) {
        acc[std::size_t(i)] = -marginal_energy(m, rows[std::size_t(i)]);
    });
    double s = 0.0;
    for (double x : acc) s += x;
    return s / double(rows.size());
}

}  // namespace

TrainResult pcd_train(const RbmModel& init_model, const std::vector<State>& train_rows,
                      const std::vector<State>& test_rows, const TrainConfig& config,
                      double init_log_z, std::optional<ChainPopulation> init_population,
                      std::optional<ChainPopulation> init_ais_population,
                      const EvalObserver& observer) {
    config.validate();
    init_model.validate();
    if (train_rows.empty()) throw std::invalid_argument("pcd_train: empty training set");

    RbmModel model = init_model;
    model.update_index = 0;

    ChainPopulation pop;
    if (init_population) {
        pop = std::move(*init_population);
    } else {
        pop = ChainPopulation::random_init(model, config.chain_count, config.seed ^ 0xC5A1);
        // an exact draw of the initial law when it is factorized; callers
        // with structured initial models should seed the population
        ags_step(model, pop, 1);
    }
    if (pop.size() != config.chain_count)
        throw std::invalid_argument("pcd_train: population size does not match config");
    pop.log_weight.assign(std::size_t(pop.size()), 0.0);

    ChainPopulation ais;
    if (init_ais_population) {
        ais = std::move(*init_ais_population);
    } else {
        ais = ChainPopulation::random_init(model, config.chain_count, config.seed ^ 0xA15C);
        ags_step(model, ais, 1);
    }
    ais.log_weight.assign(std::size_t(ais.size()), 0.0);

    TrainResult out;
    out.trais.log_z0 = init_log_z;
    TraisState jz_state;  // gradient-side bookkeeping under reweighting
    jz_state.log_z0 = init_log_z;

    RbmModel last_saved = model;

    auto record_metrics = [&](int t) {
        MetricsRow row;
        row.t = t;
        row.log_z = out.trais.estimate(ais);
        row.ll_train = dataset_mean_neg_energy(model, train_rows) - row.log_z;
        row.ll_test =
            test_rows.empty() ? 0.0 : dataset_mean_neg_energy(model, test_rows) - row.log_z;
        row.ess = config.reweighting == Reweighting::Jarzynski ? effective_sample_size(pop)
                                                               : effective_sample_size(ais);
        row.checkpoint_count = int(out.ladder.checkpoints.size());
        out.metrics.push_back(row);
        if (observer) observer(row, model);
    };

    auto checkpoint = [&](int t) {
        Checkpoint c;
        c.t = t;
        c.model = model;
        c.model.update_index = t;
        c.log_z = out.trais.estimate(ais);
        c.ll_train = dataset_mean_neg_energy(model, train_rows) - c.log_z;
        c.ll_test = test_rows.empty() ? 0.0 : dataset_mean_neg_energy(model, test_rows) - c.log_z;
        out.ladder.checkpoints.push_back(std::move(c));
    };

    checkpoint(0);
    record_metrics(0);

    // epoch shuffling: uniform random order without replacement
    std::vector<int> order(train_rows.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream shuffle_rng(config.seed, 0x5AFF1E);
    RngStream resample_rng(config.seed, 0x0E5A);
    std::size_t cursor = order.size();

    std::vector<State> batch;
    batch.reserve(std::size_t(config.batch_size));

    for (int t = 1; t <= config.total_updates; ++t) {
        batch.clear();
        for (int b = 0; b < config.batch_size; ++b) {
            if (cursor == order.size()) {
                for (std::size_t i = order.size() - 1; i > 0; --i)
                    std::swap(order[i], order[shuffle_rng.below(std::uint64_t(i) + 1)]);
                cursor = 0;
            }
            batch.push_back(train_rows[std::size_t(order[cursor++])]);
        }

        ags_step(model, pop, config.gibbs_steps);
        const Gradient g = gradient_estimate(model, batch, pop);

        RbmModel next = model;
        next.update_index = t;
        const double lr = config.learning_rate;
        for (std::size_t i = 0; i < next.w.a.size(); ++i) next.w.a[i] += lr * g.w.a[i];
        for (int i = 0; i < next.nv(); ++i) next.vbias[i] += lr * g.vbias[i];
        for (int a = 0; a < next.nh(); ++a) next.hbias[a] += lr * g.hbias[a];
        for (double x : next.w.a)
            if (!std::isfinite(x))
                throw std::runtime_error("pcd_train: non-finite parameters at update " +
                                         std::to_string(t) + " (diverging learning rate?)");

        // the AIS chains consume one kernel step under the current model,
        // then weigh the hop before ever seeing the new parameters
        ags_step(model, ais, 1);
        online_trais_update(ais, model, next, out.trais);
        if (config.reweighting == Reweighting::Jarzynski)
            jarzynski_step(pop, model, next, config.ess_threshold, jz_state, resample_rng);
        model = std::move(next);

        const double acc = estimate_swap_acceptance(model, last_saved, pop);
        if (acc < config.ladder_acceptance_target) {
            checkpoint(t);
            last_saved = model;
        }
        if (t % config.eval_every == 0 || t == config.total_updates) record_metrics(t);
    }

    if (out.ladder.checkpoints.back().t != config.total_updates) checkpoint(config.total_updates);

    out.population = std::move(pop);
    out.ais_population = std::move(ais);
    return out;
}

ChainPopulation population_from_visible(const RbmModel& m, const std::vector<State>& visible,
                                        std::uint64_t seed) {
    ChainPopulation pop;
    const int r = int(visible.size());
    pop.chains.resize(std::size_t(r));
    pop.log_weight.assign(std::size_t(r), 0.0);
    pop.rng.reserve(std::size_t(r));
    for (int c = 0; c < r; ++c) pop.rng.emplace_back(seed, std::uint64_t(c));
    const std::int8_t up = std::int8_t(spin_up(m.conv));
    const std::int8_t down = std::int8_t(spin_down(m.conv));
    Vec in;
    for (int c = 0; c < r; ++c) {
        Configuration& x = pop.chains[std::size_t(c)];
        x.v = visible[std::size_t(c)];
        hidden_inputs(m, x.v, in);
        x.h.resize(std::size_t(m.nh()));
        for (int a = 0; a < m.nh(); ++a)
            x.h[std::size_t(a)] = pop.rng[std::size_t(c)].bernoulli(unit_prob_up(in[a], m.conv))
                                      ? up
                                      : down;
    }
    return pop;
}

RbmModel independent_sites_model(const std::vector<State>& rows, Convention conv) {
    if (rows.empty()) throw std::invalid_argument("independent_sites_model: empty dataset");
    const int nv = int(rows[0].size());
    RbmModel m = RbmModel::zeros(nv, 1, conv);
    for (int i = 0; i < nv; ++i) {
        double up = 0.0;
        for (const State& r : rows) up += r[i] == 1 ? 1.0 : 0.0;
        double p = up / double(rows.size());
        p = std::min(std::max(p, 1e-4), 1.0 - 1e-4);
        m.vbias[i] =
            conv == Convention::ZeroOne ? std::log(p / (1.0 - p)) : std::atanh(2.0 * p - 1.0);
    }
    return m;
}

void save_trajectory(const TrainResult& result, const TrainConfig& config,
                     const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream idx(fs::path(dir) / "ladder.idx");
    if (!idx) throw std::runtime_error("cannot write ladder index in " + dir);
    idx.precision(17);
    for (const Checkpoint& c : result.ladder.checkpoints) {
        std::ostringstream name;
        name << "model_t" << c.t << ".rbm";
        save_model(c.model, (fs::path(dir) / name.str()).string());
        idx << c.t << ' ' << name.str() << ' ' << c.log_z << ' ' << c.ll_train << ' '
            << c.ll_test << '\n';
    }

    std::ofstream cfg(fs::path(dir) / "config");
    cfg.precision(17);
    cfg << "learning_rate=" << config.learning_rate << '\n'
        << "batch_size=" << config.batch_size << '\n'
        << "chain_count=" << config.chain_count << '\n'
        << "gibbs_steps=" << config.gibbs_steps << '\n'
        << "total_updates=" << config.total_updates << '\n'
        << "ladder_acceptance_target=" << config.ladder_acceptance_target << '\n'
        << "seed=" << config.seed << '\n'
        << "reweighting="
        << (config.reweighting == Reweighting::Jarzynski ? "jarzynski" : "none") << '\n'
        << "ess_threshold=" << config.ess_threshold << '\n'
        << "eval_every=" << config.eval_every << '\n';

    std::ofstream met(fs::path(dir) / "metrics.txt");
    met.precision(17);
    for (const MetricsRow& r : result.metrics)
        met << r.t << ' ' << r.log_z << ' ' << r.ll_train << ' ' << r.ll_test << ' ' << r.ess
            << ' ' << r.checkpoint_count << '\n';
}

TrajectoryLadder load_trajectory(const std::string& dir) {
    std::ifstream idx(fs::path(dir) / "ladder.idx");
    if (!idx) throw std::runtime_error("cannot open ladder index in " + dir);
    TrajectoryLadder ladder;
    std::string line;
    int prev_t = -1;
    while (std::getline(idx, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Checkpoint c;
        std::string fname;
        if (!(ls >> c.t >> fname >> c.log_z >> c.ll_train >> c.ll_test))
            throw std::runtime_error("malformed ladder.idx line: " + line);
        if (c.t <= prev_t) throw std::runtime_error("ladder.idx: update indices not increasing");
        prev_t = c.t;
        c.model = load_model((fs::path(dir) / fname).string());
        ladder.checkpoints.push_back(std::move(c));
    }
    if (ladder.checkpoints.empty()) throw std::runtime_error("empty trajectory in " + dir);
    return ladder;
}

}  // namespace rbm
