#pragma once

#include <vector>

#include "rbm/dataset.hpp"
#include "rbm/linalg.hpp"

namespace rbm {

// Principal directions of the (+-1 converted) data plus the bias direction
// u0 along the normalized data mean.  u0 is orthogonalized against the
// principal rows so the magnetization along it decouples from the others.
struct PcaBasis {
    Mat u;            // d x Nv, orthonormal rows
    Vec u0;           // unit vector
    Vec mean;         // +-1 data mean
    Vec spectrum;     // all covariance eigenvalues, descending
    int d() const { return u.rows; }
    int nv() const { return u.cols; }

    // m_alpha for alpha = 0..d (index 0 = bias direction).
    Vec magnetizations(const State& v_pm) const;
    // m_alpha for alpha = 1..d only.
    Vec project(const State& v_pm) const;

    // Basis including the u0 row on top: (d+1) x Nv.
    Mat full_basis() const;
};

// Top-d principal directions of the centered data (converted to +-1
// internally).  Deterministic sign rule: the largest-magnitude coordinate of
// each direction is positive.  Throws if the centered data has fewer than d
// nonzero singular values.
PcaBasis fit_pca(const BinaryDataset& data, int d);

// Projected rows (M x d), +-1 conversion applied internally.
Mat project_dataset(const PcaBasis& pca, const BinaryDataset& data);
// Projection onto u0 for every row.
Vec project_dataset_bias(const PcaBasis& pca, const BinaryDataset& data);

}  // namespace rbm
