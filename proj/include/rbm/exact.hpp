#pragma once

#include <vector>

#include "rbm/model.hpp"

namespace rbm {

// Largest layer size we are willing to enumerate (2^25 terms).
inline constexpr int kEnumerationCap = 25;

// log-sum-exp over a range of log terms.
double logsumexp(const Vec& x);

// All states of an n-unit layer in the given convention, ordered by the
// binary counter (bit j -> unit j).
std::vector<State> enumerate_states(int n, Convention c);

// log Z by enumerating the smaller layer and summing the other analytically.
// Refuses if both layers exceed the enumeration cap.
double exact_log_partition(const RbmModel& m);

// Mean of -H(v) over the rows minus exact log Z.
double exact_log_likelihood(const RbmModel& m, const std::vector<State>& rows);

struct ModelMoments {
    Mat vh;  // E[v_i h_a], stored hidden-major like W
    Vec v;   // E[v_i]
    Vec h;   // E[h_a]
};

// Exact model moments by enumerating the smaller layer; the other layer is
// handled through its conditional means.
ModelMoments exact_model_moments(const RbmModel& m);

// p(v) over all 2^Nv visible states (indexed by the binary counter).
Vec exact_visible_distribution(const RbmModel& m);

}  // namespace rbm
