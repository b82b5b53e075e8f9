#pragma once

#include <cstdint>

#include "rbm/dataset.hpp"

namespace rbm {

// Equilibrium configurations of the 2D ferromagnetic Ising model on an LxL
// periodic lattice (single-spin Metropolis; one sample every L^2 sweeps
// after burn-in).  +-1 convention, flattened row-major.
BinaryDataset gen_ising2d(int L, double beta, int count, int thermalization_sweeps,
                          std::uint64_t seed);

// Exact Curie-Weiss sampling, H = -(1/2N)(sum_i s_i)^2: the total
// magnetization is drawn from its enumerated law, then the up-spins are
// placed by a uniform permutation.
BinaryDataset gen_curie_weiss(int n, double beta, int count, std::uint64_t seed);

struct ClusterSpec {
    Vec center;     // in m-space (latent plane), length d
    double weight;  // mixture weight
    double radius;  // Gaussian radius in m units
    Vec radii;      // optional per-dimension radii (overrides radius)
};

// Planted clusters in a d-dimensional latent magnetization plane, lifted
// through a random orthonormal embedding and binarized by per-site sigmoid
// sampling.  PCA of the result reproduces the cluster geometry up to
// rotation.
BinaryDataset gen_clustered(const std::vector<ClusterSpec>& spec, int count, int nv,
                            std::uint64_t seed, Convention conv = Convention::ZeroOne);

}  // namespace rbm
