#pragma once

#include <vector>

#include "rbm/linalg.hpp"

namespace rbm {

struct CurveMinimum {
    double m = 0.0;
    double value = 0.0;
};

// Tabulated free-energy style curve; minima are the thermodynamically stable
// states, refined by golden-section search inside their bracketing triples.
struct FreeEnergyCurve {
    Vec m;
    Vec value;
    std::vector<CurveMinimum> minima;
};

Vec default_m_grid(int points = 2001, double span = 0.999);

// Curie-Weiss large-deviation function, tabulated exactly as printed:
//   Omega(m) = beta m^2/2 - log[2 cosh(beta m)] + H m
FreeEnergyCurve cw_rate_function(double beta, double h, const Vec& m_grid);

// Bernoulli-Gauss toy machine trained on a Curie-Weiss dataset at inverse
// temperature beta_T (optimal parameters w = 2 sqrt(beta_T), eta =
// -2 beta_T), annealed by beta.  The curve is the constrained free energy
// beta*f(m) over the +-1 visible magnetization m, with the hidden overlap
// eliminated at its conditional saddle point per grid point.
FreeEnergyCurve toy_rbm_free_energy(double beta_t, double beta, const Vec& m_grid);

// Signed gap f(high-|m| branch) - f(low branch); empty when either branch is
// missing.
struct BranchGap {
    bool both_present = false;
    double gap = 0.0;
    double m_low = 0.0, m_high = 0.0;
};
BranchGap toy_rbm_branch_gap(double beta_t, double beta, const Vec& m_grid);

}  // namespace rbm
