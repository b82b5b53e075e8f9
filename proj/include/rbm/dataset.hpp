#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbm/model.hpp"

namespace rbm {

enum class DatasetFormat { Text01, PackedBits };

// Row-major binary matrix with an optional label per row and a train/test
// split assignment.
struct BinaryDataset {
    std::vector<State> rows;
    std::vector<int> labels;       // empty when unlabeled
    Convention conv = Convention::ZeroOne;
    std::vector<std::uint8_t> in_train;  // empty until split() assigns

    int size() const { return int(rows.size()); }
    int nv() const { return rows.empty() ? 0 : int(rows[0].size()); }

    std::vector<State> train_rows() const;
    std::vector<State> test_rows() const;

    BinaryDataset converted(Convention target) const;
};

BinaryDataset load_dataset(const std::string& path, DatasetFormat format,
                           Convention conv = Convention::ZeroOne);
void save_dataset(const BinaryDataset& d, const std::string& path, DatasetFormat format);

// Uniform random split, deterministic per seed; fraction must be in (0,1)
// and both sides must end up nonempty.
void split(BinaryDataset& d, double train_fraction, std::uint64_t seed);

}  // namespace rbm
