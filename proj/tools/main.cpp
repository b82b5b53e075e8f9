// Command-line front end: generate data, pretrain, train, estimate
// likelihood, sample, evaluate, and run the closed-form demos.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "rbm/chain.hpp"
#include "rbm/exact.hpp"
#include "rbm/generators.hpp"
#include "rbm/likelihood.hpp"
#include "rbm/metrics.hpp"
#include "rbm/rcm.hpp"
#include "rbm/sample.hpp"
#include "rbm/theory.hpp"
#include "rbm/train.hpp"

namespace fs = std::filesystem;
using namespace rbm;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Shared {
    std::uint64_t seed = 0;
    int threads = 1;
    bool deterministic = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "base RNG seed")->capture_default_str();
        cmd->add_option("--threads", threads, "thread budget")->capture_default_str();
        cmd->add_flag("--deterministic", deterministic,
                      "force sequential execution (single thread)");
    }
    void apply() const { set_thread_budget(deterministic ? 1 : threads); }
};

// key=value manifest beside the primary output; no timestamps so reruns are
// byte-identical
void write_manifest(const std::string& primary_output, const std::string& command,
                    const std::map<std::string, std::string>& flags) {
    const fs::path p = fs::is_directory(primary_output)
                           ? fs::path(primary_output) / "manifest"
                           : fs::path(primary_output + ".manifest");
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write manifest: " + p.string());
    f << "tool=rbmtool\nversion=" << kVersion << "\ncommand=" << command << '\n';
    for (const auto& [k, v] : flags) f << k << '=' << v << '\n';
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

DatasetFormat format_from_path(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".bds" ? DatasetFormat::PackedBits
                                                                      : DatasetFormat::Text01;
}

BinaryDataset load_data(const std::string& path, const std::string& conv) {
    return load_dataset(path, format_from_path(path), convention_from_string(conv));
}

std::vector<ClusterSpec> parse_clusters(const std::vector<std::string>& specs) {
    std::vector<ClusterSpec> out;
    for (const std::string& s : specs) {
        std::vector<double> vals;
        std::istringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() < 3)
            throw std::runtime_error("cluster spec needs center...,weight,radius: " + s);
        ClusterSpec c;
        c.radius = vals.back();
        vals.pop_back();
        c.weight = vals.back();
        vals.pop_back();
        c.center = vals;
        out.push_back(std::move(c));
    }
    return out;
}

double head_log_partition(const RbmModel& head) {
    if (std::min(head.nv(), head.nh()) <= kEnumerationCap) return exact_log_partition(head);
    bool factorized = true;
    for (double w : head.w.a)
        if (w != 0.0) factorized = false;
    if (factorized) {
        double z = 0.0;
        if (head.conv == Convention::ZeroOne) {
            for (double t : head.vbias) z += softplus(t);
            for (double e : head.hbias) z += softplus(e);
        } else {
            for (double t : head.vbias) z += log2cosh(t);
            for (double e : head.hbias) z += log2cosh(e);
        }
        return z;
    }
    throw std::runtime_error(
        "head model is neither enumerable nor factorized; cannot pin log Z");
}

std::vector<RbmModel> ladder_models(const TrajectoryLadder& traj) {
    std::vector<RbmModel> out;
    for (const auto& c : traj.checkpoints) out.push_back(c.model);
    return out;
}

void write_samples(const std::vector<State>& rows, Convention conv, const std::string& path) {
    BinaryDataset d;
    d.rows = rows;
    d.conv = conv;
    save_dataset(d, path, format_from_path(path));
}

// ---------------------------------------------------------------- gen ----

int run_gen(const std::string& kind, const Shared& sh, int L, double beta, int count, int therm,
            int n, int nv, const std::vector<std::string>& clusters, const std::string& convs,
            const std::string& out) {
    BinaryDataset d;
    std::map<std::string, std::string> flags{{"out", out},
                                             {"seed", std::to_string(sh.seed)},
                                             {"count", std::to_string(count)}};
    if (kind == "ising") {
        d = gen_ising2d(L, beta, count, therm, sh.seed);
        flags["L"] = std::to_string(L);
        flags["beta"] = fmt(beta);
        flags["therm"] = std::to_string(therm);
    } else if (kind == "cw") {
        d = gen_curie_weiss(n, beta, count, sh.seed);
        flags["n"] = std::to_string(n);
        flags["beta"] = fmt(beta);
    } else {
        std::vector<ClusterSpec> spec = parse_clusters(clusters);
        if (spec.empty()) spec = {{{-0.5}, 0.5, 0.05}, {{0.5}, 0.5, 0.05}};
        d = gen_clustered(spec, count, nv, sh.seed, convention_from_string(convs));
        flags["nv"] = std::to_string(nv);
        flags["convention"] = convs;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            flags["cluster" + std::to_string(i)] = clusters[i];
    }
    save_dataset(d, out, format_from_path(out));
    write_manifest(out, "gen " + kind, flags);
    std::cout << "wrote " << d.size() << " samples (" << d.nv() << " units) to " << out << "\n";
    return 0;
}

// ----------------------------------------------------------- pretrain ----

int run_pretrain(const Shared& sh, const std::string& data_path, const std::string& convs,
                 int d, int planes, int bins, const std::string& out,
                 const std::string& rbm_out, int nh) {
    BinaryDataset data = load_data(data_path, convs);
    PcaBasis pca = fit_pca(data, d);
    RcmTrainOptions opt;
    opt.hyperplane_budget = planes;
    opt.bins_per_dim = bins;
    RcmModel rcm = rcm_train(data, pca, opt);
    save_rcm(rcm, out);
    write_manifest(out, "pretrain",
                   {{"data", data_path},
                    {"convention", convs},
                    {"d", std::to_string(d)},
                    {"planes", std::to_string(planes)},
                    {"bins", std::to_string(bins)},
                    {"nh", std::to_string(nh)},
                    {"out", out},
                    {"rbm_out", rbm_out},
                    {"seed", std::to_string(sh.seed)}});
    std::cout << "rcm: " << rcm.planes() << " hyperplanes kept, "
              << (rcm.converged ? "converged" : "NOT converged") << "\n";
    if (!rbm_out.empty()) {
        RbmModel lifted = rcm_to_rbm(rcm, nh > 0 ? nh : rcm.planes());
        if (data.conv != lifted.conv) lifted = convert_model(lifted, data.conv).model;
        save_model(lifted, rbm_out);
        std::cout << "lifted RBM (" << lifted.nv() << "x" << lifted.nh() << ") -> " << rbm_out
                  << "\n";
    }
    return 0;
}

// -------------------------------------------------------------- train ----

int run_train(const Shared& sh, const std::string& data_path, const std::string& convs, int nh,
              const std::string& init_path, const std::string& rcm_path, TrainConfig cfg,
              double train_fraction, bool desk, const std::string& out) {
    if (desk) {
        const TrainConfig d = TrainConfig::desk_scale();
        cfg.batch_size = d.batch_size;
        cfg.chain_count = d.chain_count;
        cfg.gibbs_steps = d.gibbs_steps;
    }
    cfg.seed = sh.seed;

    BinaryDataset data = load_data(data_path, convs);
    split(data, train_fraction, sh.seed ^ 0x5A17);
    const auto train_rows = data.train_rows();
    const auto test_rows = data.test_rows();

    RbmModel init;
    std::optional<ChainPopulation> pop0, ais0;
    if (!rcm_path.empty()) {
        RcmModel rcm = load_rcm(rcm_path);
        RbmModel lifted = rcm_to_rbm(rcm, nh);
        // static mesh samples of the pretrained law seed both populations
        Mat proj = project_dataset(rcm.pca, data);
        Vec proj0 = project_dataset_bias(rcm.pca, data);
        LowRankRbmEnergy energy(lifted, rcm.pca);
        MeshOptions mo;
        mo.ranges = default_mesh_ranges(rcm.pca, proj);
        mo.bias_range = default_bias_range(rcm.pca, proj0);
        MagnetizationMesh mesh = build_mesh(rcm.pca, energy, mo);
        init = data.conv == lifted.conv ? lifted : convert_model(lifted, data.conv).model;
        RngStream srng(sh.seed, 0x57A71C);
        std::vector<State> vg, va;
        for (int c = 0; c < cfg.chain_count; ++c) {
            vg.push_back(convert_state(static_sample_one(mesh, rcm.pca, srng),
                                       Convention::PlusMinus, data.conv));
            va.push_back(convert_state(static_sample_one(mesh, rcm.pca, srng),
                                       Convention::PlusMinus, data.conv));
        }
        pop0 = population_from_visible(init, vg, cfg.seed ^ 0xC5A1);
        ais0 = population_from_visible(init, va, cfg.seed ^ 0xA15C);
    } else if (!init_path.empty()) {
        init = load_model(init_path);
        if (init.conv != data.conv)
            throw std::runtime_error("initial model convention does not match the dataset");
    } else {
        RbmModel marg = independent_sites_model(train_rows, data.conv);
        init = RbmModel::zeros(data.nv(), nh, data.conv);
        init.vbias = marg.vbias;
    }

    const double logz0 = head_log_partition(init);
    TrainResult res =
        pcd_train(init, train_rows, test_rows, cfg, logz0, std::move(pop0), std::move(ais0));
    save_trajectory(res, cfg, out);
    write_manifest(out, "train",
                   {{"data", data_path},
                    {"convention", convs},
                    {"nh", std::to_string(nh)},
                    {"init", init_path},
                    {"rcm", rcm_path},
                    {"lr", fmt(cfg.learning_rate)},
                    {"batch", std::to_string(cfg.batch_size)},
                    {"chains", std::to_string(cfg.chain_count)},
                    {"k", std::to_string(cfg.gibbs_steps)},
                    {"updates", std::to_string(cfg.total_updates)},
                    {"accept", fmt(cfg.ladder_acceptance_target)},
                    {"reweight",
                     cfg.reweighting == Reweighting::Jarzynski ? "jarzynski" : "none"},
                    {"ess", fmt(cfg.ess_threshold)},
                    {"eval_every", std::to_string(cfg.eval_every)},
                    {"train_fraction", fmt(train_fraction)},
                    {"seed", std::to_string(sh.seed)},
                    {"out", out}});
    std::cout << "trained " << cfg.total_updates << " updates, "
              << res.ladder.checkpoints.size() << " checkpoints -> " << out << "\n";
    std::cout << "final: logZ~=" << res.metrics.back().log_z
              << " LL_train~=" << res.metrics.back().ll_train
              << " LL_test~=" << res.metrics.back().ll_test << "\n";
    return 0;
}

// ----------------------------------------------------------------- ll ----

int run_ll(const Shared& sh, const std::string& traj_dir, const std::string& data_path,
           const std::string& convs, const std::string& method, int points, int walkers,
           int steps, double accept, const std::string& out) {
    TrajectoryLadder traj = load_trajectory(traj_dir);
    const RbmModel& target = traj.checkpoints.back().model;
    BinaryDataset data = load_data(data_path, convs);
    split(data, 0.6, sh.seed ^ 0x5A17);
    const auto train_rows = data.train_rows();
    const auto test_rows = data.test_rows();

    auto mean_neg_energy = [&](const std::vector<State>& rows) {
        double s = 0.0;
        for (const State& v : rows) s -= marginal_energy(target, v);
        return rows.empty() ? 0.0 : s / double(rows.size());
    };

    double logz = 0.0, err = 0.0;
    if (method == "exact") {
        logz = exact_log_partition(target);
    } else if (method == "trais") {
        std::vector<RbmModel> models = ladder_models(traj);
        AisSchedule sch;
        sch.kind = ScheduleKind::Trajectory;
        if (models.size() > 2 && accept > 0.0) {
            LadderSelection sel = select_ladder(models, accept, 500, 200, sh.seed ^ 0x11);
            for (int idx : sel.indices) sch.checkpoints.push_back(models[std::size_t(idx)]);
        } else {
            sch.checkpoints = models;
        }
        sch.head_log_z = traj.checkpoints.front().log_z;
        sch.walkers = walkers;
        sch.mcmc_steps = steps;
        AisResult r = ais_estimate(target, sch, sh.seed);
        logz = r.log_z;
        err = r.stderr_jackknife;
    } else if (method == "ptt") {
        std::vector<RbmModel> models = ladder_models(traj);
        LadderRunOptions opt;
        opt.chain_count = walkers;
        opt.sweeps = std::max(points, 1);
        opt.sample_stride = std::max(opt.sweeps / 50, 1);
        opt.collect_all_models = true;
        opt.record_history = false;
        opt.seed = sh.seed;
        LadderRunResult run = ptt_run(models, opt);
        SteppingStone ss =
            ptt_log_likelihood(models, run.rung_samples, traj.checkpoints.front().log_z,
                               train_rows, test_rows);
        logz = ss.log_z.back();
    } else if (method == "ais" || method == "ais-ref") {
        AisSchedule sch;
        sch.kind =
            method == "ais" ? ScheduleKind::TemperatureFlat : ScheduleKind::TemperatureReference;
        for (int i = 0; i < points; ++i) sch.betas.push_back(i / double(points - 1));
        sch.walkers = walkers;
        sch.mcmc_steps = steps;
        RbmModel ref;
        if (method == "ais-ref") {
            RbmModel marg = independent_sites_model(train_rows, target.conv);
            ref = RbmModel::zeros(target.nv(), target.nh(), target.conv);
            ref.vbias = marg.vbias;
            ref.hbias = target.hbias;
        }
        AisResult r = ais_estimate(target, sch, sh.seed, method == "ais-ref" ? &ref : nullptr);
        logz = r.log_z;
        err = r.stderr_jackknife;
    } else {
        throw std::runtime_error("unknown ll method: " + method);
    }

    std::ostringstream table;
    table.precision(10);
    table << "method points walkers logZ stderr LL_train LL_test\n";
    table << method << ' ' << points << ' ' << walkers << ' ' << logz << ' ' << err << ' '
          << mean_neg_energy(train_rows) - logz << ' '
          << (test_rows.empty() ? 0.0 : mean_neg_energy(test_rows) - logz) << '\n';
    if (out.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream f(out);
        f << table.str();
        write_manifest(out, "ll",
                       {{"traj", traj_dir},
                        {"data", data_path},
                        {"method", method},
                        {"points", std::to_string(points)},
                        {"walkers", std::to_string(walkers)},
                        {"steps", std::to_string(steps)},
                        {"accept", fmt(accept)},
                        {"seed", std::to_string(sh.seed)},
                        {"out", out}});
    }
    return 0;
}

// ------------------------------------------------------------- sample ----

int run_sample(const Shared& sh, const std::string& traj_dir, const std::string& method,
               int sweeps, int chains, int stride, int k, double select_accept, int nt,
               const std::string& out, const std::string& diagnostics,
               const std::string& chains_out) {
    TrajectoryLadder traj = load_trajectory(traj_dir);
    std::vector<RbmModel> models = ladder_models(traj);
    const RbmModel& target = models.back();

    LadderRunOptions opt;
    opt.chain_count = chains;
    opt.sweeps = sweeps;
    opt.gibbs_steps = k;
    opt.sample_stride = stride;
    opt.seed = sh.seed;
    opt.record_history = !diagnostics.empty();

    LadderRunResult run;
    std::vector<int> kept;
    if (method == "ptt") {
        if (select_accept > 0.0 && models.size() > 2) {
            LadderSelection sel =
                select_ladder(models, select_accept, 500, 200, sh.seed ^ 0x11);
            std::vector<RbmModel> sub;
            for (int idx : sel.indices) sub.push_back(models[std::size_t(idx)]);
            kept = sel.indices;
            run = ptt_run(sub, opt);
        } else {
            for (int i = 0; i < int(models.size()); ++i) kept.push_back(i);
            run = ptt_run(models, opt);
        }
    } else if (method == "pt") {
        Vec betas;
        for (int j = 0; j < nt; ++j) betas.push_back(nt == 1 ? 1.0 : j / double(nt - 1));
        run = pt_run(target, betas, opt);
    } else if (method == "ags") {
        run = ptt_run({target}, opt);
    } else {
        throw std::runtime_error("unknown sample method: " + method);
    }

    write_samples(run.target_samples, target.conv, out);

    std::ofstream meta(out + ".meta");
    meta.precision(10);
    meta << "trajectory=" << traj_dir << "\nmethod=" << method << "\nsweeps=" << sweeps
         << "\nchains=" << chains << "\nstride=" << stride << "\nk=" << k << "\nseed=" << sh.seed
         << "\nsamples=" << run.target_samples.size() << "\n";
    for (std::size_t j = 0; j < run.pair_acceptance.size(); ++j)
        meta << "acceptance_" << j << '=' << run.pair_acceptance[j] << '\n';
    for (std::size_t j = 0; j < kept.size(); ++j)
        meta << "ladder_index_" << j << '=' << kept[j] << '\n';

    if (!chains_out.empty()) {
        // per-chain visible trajectories at the target model: one line per
        // kept sweep and chain, chain index first
        std::ofstream f(chains_out);
        const std::size_t per = std::size_t(chains);
        for (std::size_t s = 0; s < run.target_samples.size(); ++s) {
            f << (s % per);
            for (auto x : run.target_samples[s])
                f << ' ' << (target.conv == Convention::ZeroOne ? int(x) : (x + 1) / 2);
            f << '\n';
        }
    }

    if (!diagnostics.empty()) {
        std::ofstream f(diagnostics);
        f.precision(8);
        f << "pairwise acceptance\n";
        for (std::size_t j = 0; j < run.pair_acceptance.size(); ++j)
            f << j << " <-> " << j + 1 << ": " << run.pair_acceptance[j] << '\n';
        if (run.visit_history.size() > 1) {
            AutocorrelationResult ac =
                index_autocorrelation(run.visit_history, int(run.visit_history.size()));
            f << "\nindex autocorrelation\n";
            f << "tau_exp " << ac.tau_exp << " +- " << ac.tau_exp_err << '\n';
            f << "tau_int " << ac.tau_int << " +- " << ac.tau_int_err << '\n';
            f << "thermalized(length>=20tau_exp) " << (ac.thermalized ? "yes" : "no") << '\n';
            f << "t C(t) err\n";
            for (std::size_t t = 0; t < ac.c.size(); ++t)
                f << t << ' ' << ac.c[t] << ' ' << ac.c_err[t] << '\n';
        }
    }

    write_manifest(out, "sample",
                   {{"traj", traj_dir},
                    {"method", method},
                    {"sweeps", std::to_string(sweeps)},
                    {"chains", std::to_string(chains)},
                    {"stride", std::to_string(stride)},
                    {"k", std::to_string(k)},
                    {"select", fmt(select_accept)},
                    {"nt", std::to_string(nt)},
                    {"seed", std::to_string(sh.seed)},
                    {"out", out}});
    std::cout << "wrote " << run.target_samples.size() << " samples to " << out << "\n";
    return 0;
}

// --------------------------------------------------------------- eval ----

void emit_kv_or_table(const std::string& out, bool kv, const std::string& table,
                      const std::map<std::string, std::string>& kvs, const std::string& cmd,
                      const std::map<std::string, std::string>& flags) {
    std::ostringstream os;
    if (kv)
        for (const auto& [k, v] : kvs) os << k << '=' << v << '\n';
    else
        os << table;
    if (out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        f << os.str();
        write_manifest(out, cmd, flags);
    }
}

int run_eval_jumps(const Shared& sh, const std::string& history_path,
                   const std::string& data_path, const std::string& convs, bool kv,
                   const std::string& out) {
    BinaryDataset data = load_data(data_path, convs);
    PcaBasis pca = fit_pca(data, 2);
    const BinaryDataset pm = data.converted(Convention::PlusMinus);
    Separator sep = default_separator(pca, pm.rows);

    std::ifstream f(history_path);
    if (!f) throw std::runtime_error("cannot open: " + history_path);
    std::map<int, std::vector<std::array<double, 2>>> chains;
    std::string line;
    const double inv = 1.0 / std::sqrt(double(pca.nv()));
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int chain = 0;
        ls >> chain;
        double p0 = 0.0, p1 = 0.0;
        int tok = 0, i = 0;
        while (ls >> tok) {
            const double s = 2.0 * tok - 1.0;  // history rows are 0/1 text
            p0 += pca.u(0, i) * s;
            p1 += pca.u(1, i) * s;
            ++i;
        }
        if (i != pca.nv()) throw std::runtime_error("history row width mismatch");
        chains[chain].push_back({p0 * inv, p1 * inv});
    }
    std::vector<std::vector<std::array<double, 2>>> hist;
    for (auto& [id, h] : chains) hist.push_back(std::move(h));
    JumpReport rep = mode_jumps(hist, sep);

    std::ostringstream table;
    table.precision(8);
    table << "chains steps mean_jumps stderr\n"
          << hist.size() << ' ' << (hist.empty() ? 0 : hist[0].size()) << ' ' << rep.mean << ' '
          << rep.stderr_mean << '\n';
    emit_kv_or_table(out, kv, table.str(),
                     {{"chains", std::to_string(hist.size())},
                      {"mean_jumps", fmt(rep.mean)},
                      {"stderr", fmt(rep.stderr_mean)}},
                     "eval jumps",
                     {{"history", history_path},
                      {"data", data_path},
                      {"seed", std::to_string(sh.seed)},
                      {"out", out}});
    return 0;
}

int run_eval_aats(const Shared& sh, const std::string& real_path, const std::string& synth_path,
                  const std::string& convs, bool kv, const std::string& out) {
    BinaryDataset real = load_data(real_path, convs);
    BinaryDataset synth = load_data(synth_path, convs);
    const std::size_t n = std::min(real.rows.size(), synth.rows.size());
    real.rows.resize(n);
    synth.rows.resize(n);
    AatsResult r = aats(real.rows, synth.rows);
    std::ostringstream table;
    table.precision(8);
    table << "N AA_truth AA_synth AA_TS\n"
          << n << ' ' << r.aa_truth << ' ' << r.aa_synth << ' ' << r.aa_ts << '\n';
    emit_kv_or_table(out, kv, table.str(),
                     {{"n", std::to_string(n)},
                      {"aa_truth", fmt(r.aa_truth)},
                      {"aa_synth", fmt(r.aa_synth)},
                      {"aa_ts", fmt(r.aa_ts)}},
                     "eval aats",
                     {{"real", real_path},
                      {"synth", synth_path},
                      {"seed", std::to_string(sh.seed)},
                      {"out", out}});
    return 0;
}

int run_eval_moments(const Shared& sh, const std::string& data_path,
                     const std::string& samples_path, const std::string& convs, int d, bool kv,
                     const std::string& out) {
    BinaryDataset data = load_data(data_path, convs);
    BinaryDataset samples = load_data(samples_path, convs);
    PcaBasis pca = fit_pca(data, d);
    MomentReport rep = moment_report(data.rows, samples.rows, pca);
    std::ostringstream table;
    table.precision(8);
    table << "max_mean_error mean_abs_error cov_spectral_error projected_tv tv_bins\n"
          << rep.max_mean_error << ' ' << rep.mean_abs_error << ' '
          << rep.covariance_spectral_error << ' ' << rep.projected_tv << ' ' << rep.tv_bins
          << '\n';
    emit_kv_or_table(out, kv, table.str(),
                     {{"max_mean_error", fmt(rep.max_mean_error)},
                      {"mean_abs_error", fmt(rep.mean_abs_error)},
                      {"cov_spectral_error", fmt(rep.covariance_spectral_error)},
                      {"projected_tv", fmt(rep.projected_tv)}},
                     "eval moments",
                     {{"data", data_path},
                      {"samples", samples_path},
                      {"d", std::to_string(d)},
                      {"seed", std::to_string(sh.seed)},
                      {"out", out}});
    return 0;
}

// ------------------------------------------------------------- theory ----

void write_curve(const FreeEnergyCurve& curve, const std::string& out) {
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out.empty()) {
        f.open(out);
        if (!f) throw std::runtime_error("cannot open for writing: " + out);
        os = &f;
    }
    os->precision(12);
    *os << "# m value\n";
    for (std::size_t i = 0; i < curve.m.size(); ++i)
        *os << curve.m[i] << ' ' << curve.value[i] << '\n';
    for (const auto& mm : curve.minima)
        *os << "# minimum m=" << mm.m << " value=" << mm.value << '\n';
}

int run_theory_cw(const Shared& sh, double beta, double field, int points,
                  const std::string& out) {
    FreeEnergyCurve c = cw_rate_function(beta, field, default_m_grid(points));
    write_curve(c, out);
    if (!out.empty())
        write_manifest(out, "theory cw",
                       {{"beta", fmt(beta)},
                        {"field", fmt(field)},
                        {"points", std::to_string(points)},
                        {"seed", std::to_string(sh.seed)},
                        {"out", out}});
    return 0;
}

int run_theory_toyrbm(const Shared& sh, double beta_t, double beta, int points,
                      const std::string& out) {
    Vec grid;
    const double w = 2.0 * std::sqrt(beta_t);
    for (int i = 0; i < points; ++i)
        grid.push_back(-0.25 * w + 1.5 * w * i / double(points - 1));
    FreeEnergyCurve c = toy_rbm_free_energy(beta_t, beta, grid);
    write_curve(c, out);
    if (!out.empty())
        write_manifest(out, "theory toyrbm",
                       {{"beta_t", fmt(beta_t)},
                        {"beta", fmt(beta)},
                        {"points", std::to_string(points)},
                        {"seed", std::to_string(sh.seed)},
                        {"out", out}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibrium RBM training, trajectory likelihood estimation, and sampling"};
    app.require_subcommand(1);

    Shared sh;

    // gen
    auto* gen = app.add_subcommand("gen", "generate synthetic datasets");
    gen->require_subcommand(1);
    int g_L = 8, g_count = 1000, g_therm = 1000, g_n = 100, g_nv = 100;
    double g_beta = 0.44;
    std::string g_out = "data.txt", g_conv = "zeroone";
    std::vector<std::string> g_clusters;
    auto* gi = gen->add_subcommand("ising", "2D Ising equilibrium configurations");
    gi->add_option("--L", g_L, "lattice side")->capture_default_str();
    gi->add_option("--beta", g_beta, "inverse temperature")->capture_default_str();
    gi->add_option("--count", g_count)->capture_default_str();
    gi->add_option("--therm", g_therm, "burn-in sweeps")->capture_default_str();
    gi->add_option("--out", g_out)->capture_default_str();
    sh.attach(gi);
    auto* gc = gen->add_subcommand("cw", "Curie-Weiss exact samples");
    gc->add_option("--n", g_n, "spin count")->capture_default_str();
    gc->add_option("--beta", g_beta)->capture_default_str();
    gc->add_option("--count", g_count)->capture_default_str();
    gc->add_option("--out", g_out)->capture_default_str();
    sh.attach(gc);
    auto* gk = gen->add_subcommand("clusters", "planted clusters in magnetization space");
    gk->add_option("--nv", g_nv)->capture_default_str();
    gk->add_option("--count", g_count)->capture_default_str();
    gk->add_option("--cluster", g_clusters,
                   "center...,weight,radius (repeatable; default two clusters)");
    gk->add_option("--convention", g_conv)->capture_default_str();
    gk->add_option("--out", g_out)->capture_default_str();
    sh.attach(gk);

    // pretrain
    auto* pre = app.add_subcommand("pretrain", "convex low-rank pretraining");
    std::string p_data, p_conv = "zeroone", p_out = "model.rcm", p_rbm_out;
    int p_d = 2, p_planes = 500, p_bins = 101, p_nh = 100;
    pre->add_option("--data", p_data)->required();
    pre->add_option("--convention", p_conv)->capture_default_str();
    pre->add_option("--d", p_d, "intrinsic dimensions (<= 4)")->capture_default_str();
    pre->add_option("--planes", p_planes, "hyperplane budget")->capture_default_str();
    pre->add_option("--bins", p_bins, "mesh bins per dimension")->capture_default_str();
    pre->add_option("--nh", p_nh, "hidden units of the lifted model")->capture_default_str();
    pre->add_option("--out", p_out, "RCM output file")->capture_default_str();
    pre->add_option("--rbm-out", p_rbm_out, "also write the lifted RBM here");
    sh.attach(pre);

    // train
    auto* tr = app.add_subcommand("train", "PCD training with online trajectory AIS");
    std::string t_data, t_conv = "zeroone", t_init, t_rcm, t_out = "run";
    int t_nh = 100;
    bool t_desk = false;
    double t_fraction = 0.6;
    TrainConfig tcfg;
    std::string t_reweight = "none";
    tr->add_option("--data", t_data)->required();
    tr->add_option("--convention", t_conv)->capture_default_str();
    tr->add_option("--nh", t_nh)->capture_default_str();
    tr->add_option("--init", t_init, "initial RBM1 model file");
    tr->add_option("--rcm", t_rcm, "pretrained RCM1 file (lifted and used as init)");
    tr->add_option("--lr", tcfg.learning_rate)->capture_default_str();
    tr->add_option("--batch", tcfg.batch_size)->capture_default_str();
    tr->add_option("--chains", tcfg.chain_count)->capture_default_str();
    tr->add_option("--k", tcfg.gibbs_steps)->capture_default_str();
    tr->add_option("--updates", tcfg.total_updates)->capture_default_str();
    tr->add_option("--accept", tcfg.ladder_acceptance_target)->capture_default_str();
    tr->add_option("--reweight", t_reweight, "none | jarzynski")->capture_default_str();
    tr->add_option("--ess", tcfg.ess_threshold)->capture_default_str();
    tr->add_option("--eval-every", tcfg.eval_every)->capture_default_str();
    tr->add_option("--train-fraction", t_fraction)->capture_default_str();
    tr->add_flag("--desk-scale", t_desk, "batch 128, chains 128, k 10");
    tr->add_option("--out", t_out, "trajectory directory")->capture_default_str();
    sh.attach(tr);

    // ll
    auto* ll = app.add_subcommand("ll", "log-likelihood estimation");
    std::string l_traj, l_data, l_conv = "zeroone", l_method = "trais", l_out;
    int l_points = 100, l_walkers = 1000, l_steps = 1;
    double l_accept = 0.25;
    ll->add_option("--traj", l_traj)->required();
    ll->add_option("--data", l_data)->required();
    ll->add_option("--convention", l_conv)->capture_default_str();
    ll->add_option("--method", l_method, "exact | trais | ptt | ais | ais-ref")
        ->capture_default_str();
    ll->add_option("--points", l_points, "interpolation points / PTT sweeps")
        ->capture_default_str();
    ll->add_option("--walkers", l_walkers)->capture_default_str();
    ll->add_option("--steps", l_steps, "MCMC steps per point")->capture_default_str();
    ll->add_option("--accept", l_accept, "ladder sub-selection target")->capture_default_str();
    ll->add_option("--out", l_out, "write the table here instead of stdout");
    sh.attach(ll);

    // sample
    auto* sa = app.add_subcommand("sample", "draw samples from a trained trajectory");
    std::string s_traj, s_method = "ptt", s_out = "samples.txt", s_diag, s_chains_out;
    int s_sweeps = 10000, s_chains = 100, s_stride = 10, s_k = 1, s_nt = 10;
    double s_select = 0.25;
    sa->add_option("--traj", s_traj)->required();
    sa->add_option("--method", s_method, "ptt | pt | ags")->capture_default_str();
    sa->add_option("--sweeps", s_sweeps)->capture_default_str();
    sa->add_option("--chains", s_chains)->capture_default_str();
    sa->add_option("--stride", s_stride)->capture_default_str();
    sa->add_option("--k", s_k, "AGS steps per model per sweep")->capture_default_str();
    sa->add_option("--select", s_select, "PTT ladder target acceptance (0 = keep all)")
        ->capture_default_str();
    sa->add_option("--nt", s_nt, "temperature count for pt")->capture_default_str();
    sa->add_option("--out", s_out)->capture_default_str();
    sa->add_option("--diagnostics", s_diag, "write acceptance and autocorrelation tables here");
    sa->add_option("--chains-out", s_chains_out, "per-chain visible histories (for eval jumps)");
    sh.attach(sa);

    // eval
    auto* ev = app.add_subcommand("eval", "sample quality and overfitting metrics");
    ev->require_subcommand(1);
    std::string e_history, e_data, e_real, e_synth, e_samples, e_conv = "zeroone", e_out;
    int e_d = 2;
    bool e_kv = false;
    auto* ej = ev->add_subcommand("jumps", "mode jumps across the PC1 separator");
    ej->add_option("--history", e_history, "per-chain history file from sample --chains-out")
        ->required();
    ej->add_option("--data", e_data)->required();
    ej->add_option("--convention", e_conv)->capture_default_str();
    ej->add_flag("--kv", e_kv, "machine-readable key=value output");
    ej->add_option("--out", e_out);
    sh.attach(ej);
    auto* ea = ev->add_subcommand("aats", "nearest-neighbour adversarial accuracy");
    ea->add_option("--real", e_real)->required();
    ea->add_option("--synth", e_synth)->required();
    ea->add_option("--convention", e_conv)->capture_default_str();
    ea->add_flag("--kv", e_kv);
    ea->add_option("--out", e_out);
    sh.attach(ea);
    auto* em = ev->add_subcommand("moments", "moment and projected-histogram discrepancies");
    em->add_option("--data", e_data)->required();
    em->add_option("--samples", e_samples)->required();
    em->add_option("--convention", e_conv)->capture_default_str();
    em->add_option("--d", e_d)->capture_default_str();
    em->add_flag("--kv", e_kv);
    em->add_option("--out", e_out);
    sh.attach(em);

    // theory
    auto* th = app.add_subcommand("theory", "closed-form free-energy demos");
    th->require_subcommand(1);
    double th_beta = 1.4, th_field = 0.0, th_beta_t = 1.4, th_anneal = 1.0;
    int th_points = 2001;
    std::string th_out;
    auto* tc = th->add_subcommand("cw", "Curie-Weiss large-deviation function");
    tc->add_option("--beta", th_beta)->capture_default_str();
    tc->add_option("--field", th_field)->capture_default_str();
    tc->add_option("--points", th_points)->capture_default_str();
    tc->add_option("--out", th_out);
    sh.attach(tc);
    auto* tt = th->add_subcommand("toyrbm", "annealed Bernoulli-Gauss machine");
    tt->add_option("--beta-t", th_beta_t, "dataset inverse temperature")->capture_default_str();
    tt->add_option("--beta", th_anneal, "annealing inverse temperature")->capture_default_str();
    tt->add_option("--points", th_points)->capture_default_str();
    tt->add_option("--out", th_out);
    sh.attach(tt);

    CLI11_PARSE(app, argc, argv);

    try {
        sh.apply();
        if (gi->parsed())
            return run_gen("ising", sh, g_L, g_beta, g_count, g_therm, g_n, g_nv, g_clusters,
                           g_conv, g_out);
        if (gc->parsed())
            return run_gen("cw", sh, g_L, g_beta, g_count, g_therm, g_n, g_nv, g_clusters,
                           g_conv, g_out);
        if (gk->parsed())
            return run_gen("clusters", sh, g_L, g_beta, g_count, g_therm, g_n, g_nv, g_clusters,
                           g_conv, g_out);
        if (pre->parsed())
            return run_pretrain(sh, p_data, p_conv, p_d, p_planes, p_bins, p_out, p_rbm_out,
                                p_nh);
        if (tr->parsed()) {
            tcfg.reweighting =
                t_reweight == "jarzynski" ? Reweighting::Jarzynski : Reweighting::None;
            return run_train(sh, t_data, t_conv, t_nh, t_init, t_rcm, tcfg, t_fraction, t_desk,
                             t_out);
        }
        if (ll->parsed())
            return run_ll(sh, l_traj, l_data, l_conv, l_method, l_points, l_walkers, l_steps,
                          l_accept, l_out);
        if (sa->parsed())
            return run_sample(sh, s_traj, s_method, s_sweeps, s_chains, s_stride, s_k, s_select,
                              s_nt, s_out, s_diag, s_chains_out);
        if (ej->parsed()) return run_eval_jumps(sh, e_history, e_data, e_conv, e_kv, e_out);
        if (ea->parsed()) return run_eval_aats(sh, e_real, e_synth, e_conv, e_kv, e_out);
        if (em->parsed()) return run_eval_moments(sh, e_data, e_samples, e_conv, e_d, e_kv, e_out);
        if (tc->parsed()) return run_theory_cw(sh, th_beta, th_field, th_points, th_out);
        if (tt->parsed()) return run_theory_toyrbm(sh, th_beta_t, th_anneal, th_points, th_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand executed\n";
    return 1;
}
