#pragma once

// Test-side oracles and statistics helpers.  These deliberately avoid the
// library's fast paths: energies and partition functions are recomputed from
// the raw definitions so they can vouch for the production code.

#include <cstdint>
#include <vector>

#include "rbm/linalg.hpp"
#include "rbm/model.hpp"

namespace testsup {

// Triple-loop energy straight from the Hamiltonian definition.
double brute_energy(const rbm::RbmModel& m, const rbm::Configuration& x);

// log Z by summing exp(-H) over the full joint (v,h) space.
double brute_log_partition(const rbm::RbmModel& m);

// p(v) for every visible state (binary-counter order) by joint enumeration.
rbm::Vec brute_visible_distribution(const rbm::RbmModel& m);

rbm::RbmModel random_model(int nv, int nh, rbm::Convention c, std::uint64_t seed,
                           double scale = 0.5);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Chi-square goodness-of-fit p-value for observed counts against expected
// probabilities (cells with tiny expectation are pooled).
double chi_square_p(const std::vector<long>& counts, const rbm::Vec& probs);

double mean(const rbm::Vec& x);
double stddev(const rbm::Vec& x);

// 2-means / k-means on rows of points (n x dim), deterministic given seed.
struct KMeans {
    rbm::Mat centers;
    std::vector<int> assign;
};
KMeans kmeans(const rbm::Mat& points, int k, std::uint64_t seed);

}  // namespace testsup
