#pragma once

#include "rbm/linalg.hpp"

namespace rbm {

// Finite-size scaled cumulant generating function of the magnetizations
// along the orthonormal rows of `basis` (d x Nv):
//   phi(mu) = (1/Nv) sum_i log cosh( sqrt(Nv) sum_k mu_k u_{k,i} )
// phi is convex; its Legendre transform I(m) = m.mu* - phi(mu*) is the
// large-deviation rate of the prior over m.
double phi(const Mat& basis, const Vec& mu);
Vec phi_gradient(const Mat& basis, const Vec& mu);
Mat phi_hessian(const Mat& basis, const Vec& mu);

struct MuStarResult {
    Vec mu;
    bool converged = false;
    int iterations = 0;
};

// Solves grad phi(mu) = m by damped Newton on the convex function
// phi(mu) - m.mu.  Residual target 1e-10 (infinity norm); at most 200
// iterations.  Fails for m on or outside the achievable polytope.
MuStarResult solve_mu_star(const Mat& basis, const Vec& m, const Vec* warm_start = nullptr);

// Rate function I(m); throws on non-convergence.
double rate_function(const Mat& basis, const Vec& m);

}  // namespace rbm
