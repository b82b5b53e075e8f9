#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rbm/model.hpp"
#include "rbm/rng.hpp"

namespace rbm {

// Population of persistent (v,h) chains.  log_weight[r] is the log importance
// weight of chain r (the negated work accumulator of population annealing);
// all zeros means unweighted.
struct ChainPopulation {
    std::vector<Configuration> chains;
    Vec log_weight;
    std::vector<RngStream> rng;

    int size() const { return int(chains.size()); }

    // R chains with uniform random states, one RNG stream per chain.
    static ChainPopulation random_init(const RbmModel& m, int r, std::uint64_t seed);
};

// Advance every chain by k full alternations (hidden given visible, then
// visible given hidden).  Chains are independent; each consumes only its own
// stream, so the result does not depend on evaluation order.
void ags_step(const RbmModel& m, ChainPopulation& pop, int k);

// Single-configuration variant used by samplers.
void ags_step_one(const RbmModel& m, Configuration& x, RngStream& rng, int k);

// Global thread budget for the chain/mesh loops (set from the CLI).
void set_thread_budget(int n);
int thread_budget();

// Runs fn(i) for i in [0, n); splits across the thread budget.  Each index
// must write only its own slots.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace rbm
