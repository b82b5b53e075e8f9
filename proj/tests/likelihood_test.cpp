#include <cmath>

#include "doctest.h"
#include "rbm/exact.hpp"
#include "rbm/likelihood.hpp"
#include "rbm/train.hpp"
#include "support.hpp"

using namespace rbm;

namespace {

RbmModel random_factorized(int nv, int nh, std::uint64_t seed, double scale = 0.6) {
    RbmModel m = RbmModel::zeros(nv, nh, Convention::ZeroOne);
    RngStream rng(seed, 0xFAC);
    for (auto& x : m.vbias) x = scale * rng.normal();
    for (auto& x : m.hbias) x = scale * rng.normal();
    return m;
}

double analytic_factorized_log_z(const RbmModel& m) {
    double z = 0.0;
    for (double t : m.vbias) z += softplus(t);
    for (double e : m.hbias) z += softplus(e);
    return z;
}

}  // namespace

TEST_CASE("ais: degenerate schedules return the base partition function exactly") {
    RbmModel f = random_factorized(6, 3, 5);
    const double z = analytic_factorized_log_z(f);

    AisSchedule one;
    one.kind = ScheduleKind::Trajectory;
    one.checkpoints = {f};
    one.head_log_z = z;
    one.walkers = 50;
    AisResult r1 = ais_estimate(f, one, 3);
    CHECK(r1.log_z == doctest::Approx(z).epsilon(1e-14));
    CHECK(r1.stderr_jackknife == 0.0);

    AisSchedule same;
    same.kind = ScheduleKind::Trajectory;
    same.checkpoints = {f, f, f, f};
    same.head_log_z = z;
    same.walkers = 50;
    AisResult r2 = ais_estimate(f, same, 3);
    CHECK(r2.log_z == doctest::Approx(z).epsilon(1e-12));
    CHECK(r2.stderr_jackknife <= 1e-12);
}

TEST_CASE("ais: two factorized endpoints agree with the analytic difference") {
    RbmModel a = random_factorized(10, 5, 21);
    RbmModel b = random_factorized(10, 5, 22);
    AisSchedule sch;
    sch.kind = ScheduleKind::Trajectory;
    sch.checkpoints = {a, b};
    sch.head_log_z = analytic_factorized_log_z(a);
    sch.walkers = 1000;
    AisResult res = ais_estimate(b, sch, 9);
    const double want = analytic_factorized_log_z(b);
    CHECK(std::abs(res.log_z - want) < 4.0 * res.stderr_jackknife + 1e-9);
}

TEST_CASE("ais identity: exact expectation reproduces the partition ratio") {
    // enumerable two-model hop evaluated without sampling
    RbmModel a = testsup::random_model(4, 3, Convention::ZeroOne, 31, 0.5);
    RbmModel b = testsup::random_model(4, 3, Convention::ZeroOne, 32, 0.5);
    const double za = testsup::brute_log_partition(a);
    const double zb = testsup::brute_log_partition(b);

    Vec terms;
    for (const State& v : enumerate_states(4, Convention::ZeroOne))
        for (const State& h : enumerate_states(3, Convention::ZeroOne)) {
            Configuration x{v, h};
            const double logp0 = -testsup::brute_energy(a, x) - za;
            terms.push_back(logp0 - (testsup::brute_energy(b, x) - testsup::brute_energy(a, x)));
        }
    CHECK(logsumexp(terms) == doctest::Approx(zb - za).epsilon(1e-10));
}

TEST_CASE("ais: flat temperature schedule on an enumerable model, variance shrinks") {
    RbmModel m = testsup::random_model(6, 4, Convention::ZeroOne, 44, 0.5);
    const double exact = exact_log_partition(m);

    Vec betas;
    for (int i = 0; i < 30; ++i) betas.push_back(i / 29.0);
    Vec errs, stderrs;
    for (int walkers : {100, 1000, 10000}) {
        AisSchedule sch;
        sch.kind = ScheduleKind::TemperatureFlat;
        sch.betas = betas;
        sch.walkers = walkers;
        AisResult res = ais_estimate(m, sch, 7);
        errs.push_back(std::abs(res.log_z - exact));
        stderrs.push_back(res.stderr_jackknife);
        CHECK(std::abs(res.log_z - exact) < 5.0 * res.stderr_jackknife + 0.05);
    }
    CHECK(stderrs[1] < stderrs[0]);
    CHECK(stderrs[2] < stderrs[1]);
}

TEST_CASE("ais: data-centered reference schedule reaches the same answer") {
    RbmModel m = testsup::random_model(6, 4, Convention::ZeroOne, 45, 0.5);
    const double exact = exact_log_partition(m);
    ChainPopulation pop = ChainPopulation::random_init(m, 200, 4);
    ags_step(m, pop, 50);
    std::vector<State> rows;
    for (const auto& x : pop.chains) rows.push_back(x.v);
    RbmModel ref = independent_sites_model(rows, Convention::ZeroOne);
    ref.w = Mat(4, 6, 0.0);
    ref.hbias.assign(4, 0.0);

    Vec betas;
    for (int i = 0; i < 40; ++i) betas.push_back(i / 39.0);
    AisSchedule sch;
    sch.kind = ScheduleKind::TemperatureReference;
    sch.betas = betas;
    sch.walkers = 3000;
    AisResult res = ais_estimate(m, sch, 11, &ref);
    CHECK(std::abs(res.log_z - exact) < 5.0 * res.stderr_jackknife + 0.05);
}

TEST_CASE("ptt stepping stone: identical ladder gives zero ratios; factorized pair is exact") {
    RbmModel f = random_factorized(8, 4, 61);
    const double z = analytic_factorized_log_z(f);

    std::vector<std::vector<Configuration>> rungs(3);
    RngStream rng(2, 2);
    for (auto& r : rungs) {
        for (int s = 0; s < 500; ++s) {
            Configuration x;
            x.v.resize(8);
            x.h.resize(4);
            for (int i = 0; i < 8; ++i)
                x.v[std::size_t(i)] = rng.bernoulli(unit_prob_up(f.vbias[i], f.conv)) ? 1 : 0;
            for (int a = 0; a < 4; ++a)
                x.h[std::size_t(a)] = rng.bernoulli(unit_prob_up(f.hbias[a], f.conv)) ? 1 : 0;
            r.push_back(std::move(x));
        }
    }
    SteppingStone res = ptt_log_likelihood({f, f, f}, rungs, z, {}, {});
    CHECK(res.log_z[1] == doctest::Approx(z).epsilon(1e-12));
    CHECK(res.log_z[2] == doctest::Approx(z).epsilon(1e-12));
    CHECK_FALSE(res.high_variance);

    RbmModel g = random_factorized(8, 4, 62);
    SteppingStone two = ptt_log_likelihood({f, g}, {rungs[0], rungs[1]}, z, {}, {});
    // jackknife-free bound: moderate tolerance around the analytic value
    CHECK(std::abs(two.log_z[1] - analytic_factorized_log_z(g)) < 0.35);

    std::vector<std::vector<Configuration>> tiny(2);
    tiny[0].assign(30, rungs[0][0]);
    tiny[1].assign(30, rungs[1][0]);
    SteppingStone hv = ptt_log_likelihood({f, f}, tiny, z, {}, {});
    CHECK(hv.high_variance);
}

TEST_CASE("independent-sites baseline: closed forms and the factorized-model cross-check") {
    RngStream rng(9, 9);
    std::vector<State> rows;
    for (int r = 0; r < 4000; ++r) {
        State v(8);
        for (auto& x : v) x = rng.bernoulli(0.5) ? 1 : 0;
        rows.push_back(v);
    }
    const double per_sample = independent_sites_baseline(rows, Convention::ZeroOne);
    CHECK(per_sample == doctest::Approx(-8.0 * std::log(2.0)).epsilon(1e-3));

    std::vector<State> constant(50, State(5, 1));
    CHECK(independent_sites_baseline(constant, Convention::ZeroOne) ==
          doctest::Approx(5.0 * std::log(1.0 - 1e-4)).epsilon(1e-9));

    // equals the exact likelihood of the explicitly constructed factorized RBM
    std::vector<State> arb;
    for (int r = 0; r < 300; ++r) {
        State v(6);
        for (int i = 0; i < 6; ++i) v[std::size_t(i)] = rng.bernoulli(0.2 + 0.1 * i) ? 1 : 0;
        arb.push_back(v);
    }
    RbmModel f = independent_sites_model(arb, Convention::ZeroOne);
    CHECK(independent_sites_baseline(arb, Convention::ZeroOne) ==
          doctest::Approx(exact_log_likelihood(f, arb)).epsilon(1e-10));
}
