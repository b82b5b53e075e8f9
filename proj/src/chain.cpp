#include "rbm/chain.hpp"

#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>

namespace rbm {

namespace {
int g_threads = 1;
}

void set_thread_budget(int n) { g_threads = n < 1 ? 1 : n; }
int thread_budget() { return g_threads; }

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int nt = std::min(g_threads, n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

ChainPopulation ChainPopulation::random_init(const RbmModel& m, int r, std::uint64_t seed) {
    ChainPopulation pop;
    pop.chains.resize(r);
    pop.log_weight.assign(r, 0.0);
    pop.rng.reserve(r);
    const std::int8_t up = std::int8_t(spin_up(m.conv));
    const std::int8_t down = std::int8_t(spin_down(m.conv));
    for (int c = 0; c < r; ++c) {
        pop.rng.emplace_back(seed, std::uint64_t(c));
        Configuration& x = pop.chains[c];
        x.v.resize(m.nv());
        x.h.resize(m.nh());
        for (auto& s : x.v) s = pop.rng[c].bernoulli(0.5) ? up : down;
        for (auto& s : x.h) s = pop.rng[c].bernoulli(0.5) ? up : down;
    }
    return pop;
}

void ags_step_one(const RbmModel& m, Configuration& x, RngStream& rng, int k) {
    const int nv = m.nv(), nh = m.nh();
    const std::int8_t up = std::int8_t(spin_up(m.conv));
    const std::int8_t down = std::int8_t(spin_down(m.conv));
    Vec in;
    for (int step = 0; step < k; ++step) {
        hidden_inputs(m, x.v, in);
        for (int a = 0; a < nh; ++a)
            x.h[a] = rng.bernoulli(unit_prob_up(in[a], m.conv)) ? up : down;
        visible_inputs(m, x.h, in);
        for (int i = 0; i < nv; ++i)
            x.v[i] = rng.bernoulli(unit_prob_up(in[i], m.conv)) ? up : down;
    }
}

void ags_step(const RbmModel& m, ChainPopulation& pop, int k) {
    if (k < 1) throw std::invalid_argument("ags_step: k must be >= 1");
    parallel_for(pop.size(), [&](int r) { ags_step_one(m, pop.chains[r], pop.rng[r], k); });
}

}  // namespace rbm
