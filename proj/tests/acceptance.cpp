// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbm/chain.hpp"
#include "rbm/exact.hpp"
#include "rbm/generators.hpp"
#include "rbm/likelihood.hpp"
#include "rbm/metrics.hpp"
#include "rbm/rcm.hpp"
#include "rbm/sample.hpp"
#include "rbm/theory.hpp"
#include "rbm/train.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace rbm;

namespace {

int failures = 0;

void report(int id, const char* what, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(5);
    os << x;
    return os.str();
}

struct TrainedToy {
    BinaryDataset data;
    std::vector<State> train_rows;
    RcmModel rcm;
    RbmModel lifted_pm;           // +-1 lifted model (trajectory head)
    MagnetizationMesh head_mesh;  // static sampler of the head
    TrainResult result;
    TrainConfig config;
    double ll_worst_after_500 = 0.0;
    double seconds = 0.0;
};

// shared pretrain+PCD run on a two-cluster set (criteria 1, 2, 4)
TrainedToy train_toy() {
    TrainedToy t;
    t.data = gen_clustered({{{-0.72, 0.0}, 0.72, 0.0, {0.025, 0.25}},
                            {{0.75, 0.0}, 0.28, 0.0, {0.025, 0.18}}},
                           1500, 16, 42, Convention::ZeroOne);
    t.train_rows = t.data.rows;

    const auto t0 = std::chrono::steady_clock::now();
    PcaBasis pca = fit_pca(t.data, 1);
    RcmTrainOptions ropt;
    ropt.hyperplane_budget = 10;
    t.rcm = rcm_train(t.data, pca, ropt);
    t.lifted_pm = rcm_to_rbm(t.rcm, 10);
    const ConvertedModel init = convert_model(t.lifted_pm, Convention::ZeroOne);

    LowRankRbmEnergy energy(t.lifted_pm, pca);
    MeshOptions mo;
    mo.ranges = default_mesh_ranges(pca, project_dataset(pca, t.data));
    mo.bias_range = default_bias_range(pca, project_dataset_bias(pca, t.data));
    t.head_mesh = build_mesh(pca, energy, mo);

    t.config = TrainConfig::desk_scale();
    t.config.learning_rate = 0.02;
    t.config.chain_count = 256;
    t.config.total_updates = 10000;
    t.config.eval_every = 100;
    t.config.seed = 4242;
    t.config.seed = 4242;

    RngStream srng(t.config.seed, 0x57A7);
    std::vector<State> vg, va;
    for (int c = 0; c < t.config.chain_count; ++c) {
        vg.push_back(convert_state(static_sample_one(t.head_mesh, t.rcm.pca, srng),
                                   Convention::PlusMinus, Convention::ZeroOne));
        va.push_back(convert_state(static_sample_one(t.head_mesh, t.rcm.pca, srng),
                                   Convention::PlusMinus, Convention::ZeroOne));
    }
    ChainPopulation pop0 = population_from_visible(init.model, vg, t.config.seed ^ 0xC5A1);
    ChainPopulation ais0 = population_from_visible(init.model, va, t.config.seed ^ 0xA15C);

    t.result = pcd_train(init.model, t.train_rows, {}, t.config,
                         exact_log_partition(init.model), std::move(pop0), std::move(ais0),
                         [&](const MetricsRow& row, const RbmModel& m) {
                             if (row.t < 500) return;
                             const double exact = exact_log_likelihood(m, t.train_rows);
                             t.ll_worst_after_500 =
                                 std::max(t.ll_worst_after_500, std::abs(row.ll_train - exact));
                         });
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return t;
}

void criterion_1(const TrainedToy& toy) {
    const bool ok = toy.ll_worst_after_500 <= 0.5 && toy.seconds <= 300.0;
    report(1, "online trajectory-AIS tracks the exact likelihood", ok,
           "worst |error| after update 500 = " + fmt(toy.ll_worst_after_500) + " nat, " +
               fmt(toy.seconds) + " s, " +
               std::to_string(toy.result.ladder.checkpoints.size()) + " checkpoints");
}

void criterion_2(const TrainedToy& toy) {
    const RbmModel& target = toy.result.ladder.checkpoints.back().model;
    const double exact_ll = exact_log_likelihood(target, toy.train_rows);
    double mean_neg = 0.0;
    for (const State& v : toy.train_rows) mean_neg -= marginal_energy(target, v);
    mean_neg /= double(toy.train_rows.size());

    // The checkpoints were saved by the 0.25-acceptance monitor, so they are
    // the 0.25 ladder.  Equal total MCMC budget: 400 walkers x 100 sweeps for
    // the flat schedule, and the same sweep total split across the
    // trajectory's interior rungs.
    std::vector<RbmModel> sub;
    for (const auto& c : toy.result.ladder.checkpoints) sub.push_back(c.model);
    const long total_budget = 400L * 100L;
    const int interior = std::max(int(sub.size()) - 2, 1);
    const int walkers_tr = int(total_budget / interior);

    double err_tr = 0.0, err_flat = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
        AisSchedule str;
        str.kind = ScheduleKind::Trajectory;
        str.checkpoints = sub;
        str.head_log_z = toy.result.ladder.checkpoints.front().log_z;
        str.walkers = walkers_tr;
        str.mcmc_steps = 1;
        const AisResult rt = ais_estimate(target, str, 1000 + seed);  // exact enumerable head
        err_tr += std::abs((mean_neg - rt.log_z) - exact_ll) / 10.0;

        AisSchedule sfl;
        sfl.kind = ScheduleKind::TemperatureFlat;
        for (int i = 0; i < 100; ++i) sfl.betas.push_back(i / 99.0);
        sfl.walkers = 400;
        sfl.mcmc_steps = 1;
        const AisResult rf = ais_estimate(target, sfl, 2000 + seed);
        err_flat += std::abs((mean_neg - rf.log_z) - exact_ll) / 10.0;
    }
    report(2, "offline trajectory AIS beats flat temperature AIS at equal budget",
           err_tr < err_flat,
           "mean |LL error|: trajectory " + fmt(err_tr) + " vs flat " + fmt(err_flat) +
               " nat over " + std::to_string(sub.size()) + " saved checkpoints");
}

void criterion_3() {
    bool ok = true;
    double worst = 0.0;
    RbmModel m = testsup::random_model(8, 4, Convention::ZeroOne, 321, 0.4);
    ChainPopulation rows_src = ChainPopulation::random_init(m, 50, 11);
    std::vector<State> rows;
    for (const auto& x : rows_src.chains) rows.push_back(x.v);
    const Gradient g = exact_gradient(m, rows);
    const double h = 1e-5;
    auto check = [&](double* p, double got) {
        const double keep = *p;
        *p = keep + h;
        const double up = exact_log_likelihood(m, rows);
        *p = keep - h;
        const double dn = exact_log_likelihood(m, rows);
        *p = keep;
        const double want = (up - dn) / (2.0 * h);
        const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-8);
        worst = std::max(worst, rel);
        if (rel > 1e-6) ok = false;
    };
    for (int a = 0; a < m.nh(); ++a)
        for (int i = 0; i < m.nv(); ++i) check(&m.w(a, i), g.w(a, i));
    for (int i = 0; i < m.nv(); ++i) check(&m.vbias[i], g.vbias[i]);
    for (int a = 0; a < m.nh(); ++a) check(&m.hbias[a], g.hbias[a]);
    report(3, "analytic gradient matches central finite differences", ok,
           "worst relative error " + fmt(worst));
}

double mean_jumps(const std::vector<State>& samples, int chains, const PcaBasis& pca,
                  const Separator& sep) {
    std::vector<std::vector<std::array<double, 2>>> hist{std::size_t(chains)};
    const double inv = 1.0 / std::sqrt(double(pca.nv()));
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double p0 = 0.0, p1 = 0.0;
        for (int i = 0; i < pca.nv(); ++i) {
            p0 += pca.u(0, i) * samples[s][std::size_t(i)];
            p1 += pca.u(1, i) * samples[s][std::size_t(i)];
        }
        hist[s % std::size_t(chains)].push_back({p0 * inv, p1 * inv});
    }
    return mode_jumps(hist, sep).mean;
}

void criterion_4(const TrainedToy& toy) {
    // the projection plane needs two principal directions
    PcaBasis pca2 = fit_pca(toy.data, 2);
    Separator sep = default_separator(pca2, toy.data.converted(Convention::PlusMinus).rows);

    std::vector<RbmModel> models;
    for (const auto& c : toy.result.ladder.checkpoints)
        models.push_back(convert_model(c.model, Convention::PlusMinus).model);
    LadderSelection sel = select_ladder(models, 0.25, 500, 200, 7);
    std::vector<RbmModel> sub;
    for (int idx : sel.indices) sub.push_back(models[std::size_t(idx)]);

    const RbmModel target = models.back();
    const int chains = 1000;
    const long total_budget = 10000;

    LadderRunOptions base;
    base.chain_count = chains;
    base.gibbs_steps = 1;
    base.sample_stride = 1;
    base.record_history = false;
    base.seed = 31;

    LadderRunOptions oa = base;
    oa.sweeps = int(total_budget);
    const double j_ags = mean_jumps(ptt_run({target}, oa).target_samples, chains, pca2, sep);

    LadderRunOptions op = base;
    op.sweeps = int(total_budget / long(sub.size()));
    RcmHead head{&toy.head_mesh, &toy.rcm.pca};
    const double j_ptt =
        mean_jumps(ptt_run(sub, op, head).target_samples, chains, pca2, sep);

    double j_pt_best = 0.0;
    int best_nt = 0;
    for (int nt : {5, 10, 20}) {
        Vec betas;
        for (int j = 0; j < nt; ++j) betas.push_back(j / double(nt - 1));
        LadderRunOptions ot = base;
        ot.sweeps = int(total_budget / long(nt));
        const double j =
            mean_jumps(pt_run(target, betas, ot).target_samples, chains, pca2, sep);
        if (j > j_pt_best) {
            j_pt_best = j;
            best_nt = nt;
        }
    }

    const bool ok = j_ptt >= 10.0 * j_ags && j_ptt >= j_pt_best;
    report(4, "PTT accelerates mode mixing at equal AGS budget", ok,
           "jumps/chain: PTT " + fmt(j_ptt) + " (ladder " + std::to_string(sub.size()) +
               "), AGS " + fmt(j_ags) + ", best PT " + fmt(j_pt_best) +
               " (NT=" + std::to_string(best_nt) + ")");
}

void criterion_5() {
    // explicit stationarity of the exchange kernel on a 2-model system
    RbmModel m1 = testsup::random_model(1, 1, Convention::ZeroOne, 31, 0.8);
    RbmModel m2 = testsup::random_model(1, 1, Convention::ZeroOne, 32, 0.8);
    const auto vs = enumerate_states(1, Convention::ZeroOne);
    const auto hs = enumerate_states(1, Convention::ZeroOne);
    std::vector<Configuration> states;
    for (const auto& v : vs)
        for (const auto& h : hs) states.push_back({v, h});
    const int n = int(states.size());
    Vec pi1(n, 0.0), pi2(n, 0.0), dh(n, 0.0);
    const double z1 = testsup::brute_log_partition(m1), z2 = testsup::brute_log_partition(m2);
    for (int i = 0; i < n; ++i) {
        pi1[i] = std::exp(-testsup::brute_energy(m1, states[i]) - z1);
        pi2[i] = std::exp(-testsup::brute_energy(m2, states[i]) - z2);
        dh[i] = testsup::brute_energy(m2, states[i]) - testsup::brute_energy(m1, states[i]);
    }
    double resid = 0.0;
    for (int i2 = 0; i2 < n; ++i2)
        for (int j2 = 0; j2 < n; ++j2) {
            double inflow = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double acc = std::min(1.0, std::exp(dh[j] - dh[i]));
                    double t = 0.0;
                    if (j == i2 && i == j2) t += acc;
                    if (i == i2 && j == j2) t += 1.0 - acc;
                    inflow += pi1[i] * pi2[j] * t;
                }
            resid = std::max(resid, std::abs(inflow - pi1[i2] * pi2[j2]));
        }

    // long-run joint law of an actual two-model PTT run
    RbmModel target = testsup::random_model(2, 1, Convention::ZeroOne, 41, 0.7);
    RbmModel milder = target;
    for (auto& x : milder.w.a) x *= 0.4;
    for (auto& x : milder.vbias) x *= 0.4;
    for (auto& x : milder.hbias) x *= 0.4;
    LadderRunOptions opt;
    opt.chain_count = 40;
    opt.sweeps = 30000;
    opt.sample_stride = 10;
    opt.collect_all_models = true;
    opt.record_history = false;
    opt.seed = 17;
    LadderRunResult run = ptt_run({milder, target}, opt);
    auto code_of = [](const Configuration& x) {
        int c = 0, bit = 0;
        for (auto s : x.v) c |= int(s) << bit++;
        for (auto s : x.h) c |= int(s) << bit++;
        return c;
    };
    Vec p_low(8, 0.0), p_high(8, 0.0);
    const double zl = testsup::brute_log_partition(milder);
    const double zh = testsup::brute_log_partition(target);
    for (const auto& v : enumerate_states(2, Convention::ZeroOne))
        for (const auto& h : enumerate_states(1, Convention::ZeroOne)) {
            Configuration x{v, h};
            p_low[std::size_t(code_of(x))] = std::exp(-testsup::brute_energy(milder, x) - zl);
            p_high[std::size_t(code_of(x))] = std::exp(-testsup::brute_energy(target, x) - zh);
        }
    Vec joint(64, 0.0);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) joint[std::size_t(i * 8 + j)] = p_low[i] * p_high[j];
    std::vector<long> counts(64, 0);
    for (std::size_t s = 0; s < run.rung_samples[0].size(); ++s)
        ++counts[std::size_t(code_of(run.rung_samples[0][s]) * 8 +
                             code_of(run.rung_samples[1][s]))];
    const double p = testsup::chi_square_p(counts, joint);

    report(5, "exchange kernel is exact", resid <= 1e-10 && p > 0.01,
           "stationarity residual " + fmt(resid) + ", joint chi-square p = " + fmt(p));
}

void criterion_6() {
    const int nv = 961;  // large enough that spin noise stays below the bins
    BinaryDataset d = gen_clustered({{{-0.38, -0.2}, 0.3, 0.06},
                                     {{0.38, -0.2}, 0.3, 0.06},
                                     {{0.0, 0.38}, 0.4, 0.06}},
                                    6000, nv, 77, Convention::PlusMinus);
    PcaBasis pca = fit_pca(d, 2);
    RcmTrainOptions opt;
    opt.hyperplane_budget = 320;
    opt.bins_per_dim = 101;
    RcmModel rcm = rcm_train(d, pca, opt);

    Mat proj = project_dataset(pca, d);
    Vec proj0 = project_dataset_bias(pca, d);
    MagnetizationMesh mesh = build_rcm_mesh(rcm, proj, proj0, 101, 101);

    Vec data_m(2, 0.0);
    for (int r = 0; r < proj.rows; ++r)
        for (int k = 0; k < 2; ++k) data_m[std::size_t(k)] += proj(r, k) / proj.rows;
    Vec model_m(2, 0.0);
    for (std::size_t c = 0; c < mesh.main.ncells(); ++c)
        if (mesh.main.feasible[c]) {
            const Vec mc = mesh.main.center_of(c);
            const double pc = std::exp(mesh.main.log_density[c]);
            model_m[0] += pc * mc[0];
            model_m[1] += pc * mc[1];
        }
    const double gap =
        std::max(std::abs(model_m[0] - data_m[0]), std::abs(model_m[1] - data_m[1]));

    RngStream rng(5, 1);
    Vec hist(mesh.main.ncells(), 0.0);
    const int n = 100000;
    int inside = 0;
    for (int s = 0; s < n; ++s) {
        const State v = static_sample_one(mesh, pca, rng);
        const Vec mm = pca.magnetizations(v);
        const std::size_t cell = mesh.main.locate({mm[1], mm[2]});
        if (cell != MeshGrid::npos) {
            hist[cell] += 1.0;
            ++inside;
        }
    }
    for (auto& x : hist) x /= inside;
    double tv = 0.0;
    for (std::size_t c = 0; c < hist.size(); ++c) {
        const double got = mesh.main.feasible[c] ? std::exp(mesh.main.log_density[c]) : 0.0;
        tv += std::abs(got - hist[c]);
    }
    tv *= 0.5;

    report(6, "RCM pretraining reaches stationarity and its sampler matches the mesh",
           rcm.converged && gap <= 1e-3 && tv <= 0.05,
           std::string(rcm.converged ? "converged" : "NOT converged") + ", moment gap " +
               fmt(gap) + ", TV " + fmt(tv) + " at 1e5 samples");
}

void criterion_7() {
    Vec grid;
    const double w = 2.0 * std::sqrt(1.4);
    for (int i = 0; i <= 3000; ++i) grid.push_back(-0.25 * w + 1.5 * w * i / 3000.0);
    FreeEnergyCurve co = toy_rbm_free_energy(1.4, 1.0, grid);
    const bool coexist =
        co.minima.size() == 2 && std::abs(co.minima[0].value - co.minima[1].value) <= 1e-3;

    int sign_changes = 0, prev = 0;
    for (int s = 0; s <= 50; ++s) {
        const double beta = 0.80 + 0.005 * s;
        BranchGap g = toy_rbm_branch_gap(1.4, beta, grid);
        const int sign = g.both_present ? (g.gap > 0.0 ? 1 : -1) : 1;
        if (prev != 0 && sign != prev) ++sign_changes;
        prev = sign;
    }
    report(7, "annealed toy machine shows a first-order transition at beta = 1",
           coexist && sign_changes == 1,
           "coexistence gap " +
               fmt(co.minima.size() == 2 ? std::abs(co.minima[0].value - co.minima[1].value)
                                         : -1.0) +
               ", sign changes " + std::to_string(sign_changes));
}

void criterion_8() {
    const Vec grid = default_m_grid();
    bool counts_ok = true, continuous = true;
    double prev = 0.0;
    for (int s = 0; s <= 60; ++s) {
        const double beta = 0.2 + 0.02 * s;
        if (beta > 1.0 && beta < 1.02 - 1e-12) continue;
        FreeEnergyCurve c = cw_rate_function(beta, 0.0, grid);
        double pos = 0.0;
        if (beta <= 1.0) {
            if (c.minima.size() != 1 || std::abs(c.minima[0].m) > 1e-6) counts_ok = false;
        } else {
            if (c.minima.size() != 2) counts_ok = false;
            for (const auto& mm : c.minima) pos = std::max(pos, mm.m);
        }
        if (pos < prev - 1e-9 || pos - prev > 0.25) continuous = false;
        prev = pos;
    }
    double mstar = 0.8;
    for (int it = 0; it < 100000; ++it) mstar = std::tanh(1.4 * mstar);
    const double endpoint_err = std::abs(prev - mstar);
    report(8, "Curie-Weiss minima emerge continuously past beta = 1",
           counts_ok && continuous && endpoint_err <= 1e-4,
           "endpoint |m - tanh fixed point| = " + fmt(endpoint_err));
}

void criterion_9() {
    RngStream rng(12, 0);
    std::vector<std::vector<std::vector<std::int16_t>>> flip(2);
    const double flip_p = 0.1;  // gives autocorrelation 0.8^t
    for (int g = 0; g < 2; ++g) {
        flip[std::size_t(g)].resize(500);
        for (auto& h : flip[std::size_t(g)]) {
            h.resize(10000);
            std::int16_t s = std::int16_t(g);
            for (auto& x : h) {
                if (rng.bernoulli(flip_p)) s = std::int16_t(1 - s);
                x = s;
            }
        }
    }
    const AutocorrelationResult ar = index_autocorrelation(flip, 2);

    std::vector<std::vector<std::vector<std::int16_t>>> iid(4);
    for (int g = 0; g < 4; ++g) {
        iid[std::size_t(g)].resize(250);
        for (auto& h : iid[std::size_t(g)]) {
            h.resize(4000);
            for (auto& x : h) x = std::int16_t(rng.below(4));
        }
    }
    const AutocorrelationResult id = index_autocorrelation(iid, 4);

    const bool ok = std::abs(ar.tau_int - 4.5) <= 0.45 && std::abs(id.tau_int - 0.5) <= 0.02;
    report(9, "index autocorrelation times match the analytic walks", ok,
           "AR(1)-like tau_int " + fmt(ar.tau_int) + " (want 4.5 +- 10%), iid tau_int " +
               fmt(id.tau_int));
}

void criterion_10() {
    ChainPopulation pop;
    const int r = 512;
    pop.chains.assign(std::size_t(r), Configuration{State(3, 0), State(2, 0)});
    pop.log_weight.assign(std::size_t(r), 1.3);
    const double ess_equal = effective_sample_size(pop);
    pop.log_weight.assign(std::size_t(r), -50.0);
    pop.log_weight[0] = 0.0;
    const double ess_dom = effective_sample_size(pop);

    RbmModel m = RbmModel::zeros(3, 2, Convention::ZeroOne);
    ChainPopulation p2 = ChainPopulation::random_init(m, r, 3);
    p2.log_weight.assign(std::size_t(r), 0.7);
    TraisState st;
    RngStream rng(4, 4);
    resample_population(p2, st, rng);
    bool reset_ok = p2.size() == r;
    for (double lw : p2.log_weight)
        if (lw != 0.0) reset_ok = false;

    const bool ok = std::abs(ess_equal - 1.0) <= 1e-12 &&
                    std::abs(ess_dom - 1.0 / r) <= 1e-6 && reset_ok;
    report(10, "effective sample size and resampling behave as defined", ok,
           "equal-weight ESS " + fmt(ess_equal) + ", dominant-weight ESS " + fmt(ess_dom) +
               " (1/R = " + fmt(1.0 / r) + ")");
}

void criterion_11() {
    RngStream rng(11, 0);
    std::vector<State> real;
    while (real.size() < 200) {
        State v(24);
        for (auto& x : v) x = rng.bernoulli(0.5) ? 1 : 0;
        if (std::find(real.begin(), real.end(), v) == real.end()) real.push_back(v);
    }
    const double copy_ts = aats(real, real).aa_ts;

    std::vector<State> lo, hi;
    for (int r = 0; r < 50; ++r) {
        State a(24, 0), b(24, 1);
        a[std::size_t(r % 24)] = 1;
        b[std::size_t(r % 24)] = 0;
        lo.push_back(a);
        hi.push_back(b);
    }
    const double sep_ts = aats(lo, hi).aa_ts;

    double mean_ts = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
        RngStream r2(100 + seed, 1);
        std::vector<State> a, b;
        for (int n = 0; n < 1000; ++n) {
            State va(24), vb(24);
            for (auto& x : va) x = r2.bernoulli(0.5) ? 1 : 0;
            for (auto& x : vb) x = r2.bernoulli(0.5) ? 1 : 0;
            a.push_back(va);
            b.push_back(vb);
        }
        mean_ts += aats(a, b).aa_ts / 10.0;
    }

    std::vector<State> train(real.begin(), real.begin() + 100);
    std::vector<State> test;
    {
        RngStream r3(55, 2);
        while (test.size() < 100) {
            State v(24);
            for (auto& x : v) x = r3.bernoulli(0.5) ? 1 : 0;
            test.push_back(v);
        }
    }
    const double loss = privacy_loss(train, test, train);

    const bool ok =
        copy_ts == 0.0 && sep_ts == 1.0 && mean_ts >= 0.45 && mean_ts <= 0.55 && loss > 0.0;
    report(11, "adversarial accuracy flags copies, separation, and identical laws", ok,
           "copy " + fmt(copy_ts) + ", separated " + fmt(sep_ts) + ", same-law " +
               fmt(mean_ts) + ", privacy loss on copied train " + fmt(loss));
}

void criterion_12() {
    const fs::path base = fs::temp_directory_path() / "rbm_acceptance_det";
    fs::remove_all(base);
    std::vector<fs::path> dirs = {base / "a", base / "b"};
    for (const fs::path& dir : dirs) {
        fs::create_directories(dir);
        BinaryDataset d = gen_clustered({{{-0.5}, 0.5, 0.05}, {{0.5}, 0.5, 0.05}}, 400, 12, 3,
                                        Convention::ZeroOne);
        save_dataset(d, (dir / "data.txt").string(), DatasetFormat::Text01);
        RbmModel marg = independent_sites_model(d.rows, Convention::ZeroOne);
        RbmModel init = RbmModel::zeros(12, 4, Convention::ZeroOne);
        init.vbias = marg.vbias;
        TrainConfig cfg = TrainConfig::desk_scale();
        cfg.batch_size = 32;
        cfg.chain_count = 32;
        cfg.gibbs_steps = 3;
        cfg.total_updates = 200;
        cfg.eval_every = 50;
        cfg.seed = 99;
        TrainResult res = pcd_train(init, d.rows, {}, cfg, exact_log_partition(init));
        save_trajectory(res, cfg, (dir / "run").string());
    }
    bool ok = true;
    std::string bad;
    for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), dirs[0]);
        std::ifstream fa(entry.path(), std::ios::binary), fb(dirs[1] / rel, std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str()) {
            ok = false;
            bad = rel.string();
        }
    }
    fs::remove_all(base);
    report(12, "identical configurations give byte-identical pipelines", ok,
           ok ? "all artifacts matched" : "first mismatch: " + bad);
}

}  // namespace

int main() {
    set_thread_budget(2);
    std::printf("acceptance suite\n");

    TrainedToy toy = train_toy();
    criterion_1(toy);
    criterion_2(toy);
    criterion_3();
    criterion_4(toy);
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();

    std::printf("%s\n", failures == 0 ? "all criteria passed" : "SOME CRITERIA FAILED");
    return failures == 0 ? 0 : 1;
}
