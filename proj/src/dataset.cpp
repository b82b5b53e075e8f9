#include "rbm/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rbm/rng.hpp"

namespace rbm {

std::vector<State> BinaryDataset::train_rows() const {
    if (in_train.empty()) return rows;
    std::vector<State> out;
    for (int i = 0; i < size(); ++i)
        if (in_train[i]) out.push_back(rows[i]);
    return out;
}

std::vector<State> BinaryDataset::test_rows() const {
    std::vector<State> out;
    for (int i = 0; i < size(); ++i)
        if (!in_train.empty() && !in_train[i]) out.push_back(rows[i]);
    return out;
}

BinaryDataset BinaryDataset::converted(Convention target) const {
    if (target == conv) return *this;
    BinaryDataset out = *this;
    out.conv = target;
    for (auto& r : out.rows) r = convert_state(r, conv, target);
    return out;
}

namespace {

std::int8_t decode_bit(int bit, Convention conv) {
    if (conv == Convention::ZeroOne) return std::int8_t(bit);
    return bit ? std::int8_t(1) : std::int8_t(-1);
}

int encode_bit(std::int8_t v, Convention conv) {
    if (conv == Convention::ZeroOne) return v;
    return v > 0 ? 1 : 0;
}

BinaryDataset load_text(const std::string& path, Convention conv) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    BinaryDataset d;
    d.conv = conv;
    std::string line;
    int lineno = 0;
    bool any_label = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        State row;
        int label = -1;
        bool in_label = false;
        std::string tok;
        while (ls >> tok) {
            if (tok == "|") {
                in_label = true;
                continue;
            }
            if (in_label) {
                label = std::stoi(tok);
                any_label = true;
            } else if (tok == "0" || tok == "1") {
                row.push_back(decode_bit(tok == "1", conv));
            } else {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": invalid token '" + tok + "'");
            }
        }
        if (row.empty()) continue;
        if (!d.rows.empty() && row.size() != d.rows[0].size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": ragged row (expected " +
                                     std::to_string(d.rows[0].size()) + " tokens)");
        d.rows.push_back(std::move(row));
        d.labels.push_back(label);
    }
    if (!any_label) d.labels.clear();
    return d;
}

void save_text(const BinaryDataset& d, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (int r = 0; r < d.size(); ++r) {
        const State& row = d.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ' ';
            f << encode_bit(row[i], d.conv);
        }
        if (!d.labels.empty() && d.labels[r] >= 0) f << " | " << d.labels[r];
        f << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

BinaryDataset load_packed(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string header;
    std::getline(f, header);
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "BDS1") throw std::runtime_error("BDS1: bad magic in " + path);
    long m = -1, nv = -1;
    Convention conv = Convention::ZeroOne;
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::runtime_error("BDS1: malformed header: " + tok);
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "m") m = std::stol(v);
        else if (k == "nv") nv = std::stol(v);
        else if (k == "convention") conv = convention_from_string(v);
    }
    if (m < 0 || nv <= 0) throw std::runtime_error("BDS1: missing dimensions");
    const std::size_t rowbytes = std::size_t(nv + 7) / 8;
    BinaryDataset d;
    d.conv = conv;
    d.rows.assign(std::size_t(m), State(std::size_t(nv)));
    std::vector<char> buf(rowbytes);
    for (long r = 0; r < m; ++r) {
        f.read(buf.data(), std::streamsize(rowbytes));
        if (std::size_t(f.gcount()) != rowbytes)
            throw std::runtime_error("BDS1: truncated payload at row " + std::to_string(r));
        for (long i = 0; i < nv; ++i) {
            const int bit = (buf[std::size_t(i) / 8] >> (i % 8)) & 1;
            d.rows[std::size_t(r)][std::size_t(i)] = decode_bit(bit, conv);
        }
    }
    return d;
}

void save_packed(const BinaryDataset& d, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "BDS1 m=" << d.size() << " nv=" << d.nv() << " convention=" << to_string(d.conv)
      << "\n";
    const std::size_t rowbytes = std::size_t(d.nv() + 7) / 8;
    std::vector<char> buf;
    for (const State& row : d.rows) {
        buf.assign(rowbytes, 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            if (encode_bit(row[i], d.conv)) buf[i / 8] |= char(1 << (i % 8));
        f.write(buf.data(), std::streamsize(rowbytes));
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

BinaryDataset load_dataset(const std::string& path, DatasetFormat format, Convention conv) {
    return format == DatasetFormat::Text01 ? load_text(path, conv) : load_packed(path);
}

void save_dataset(const BinaryDataset& d, const std::string& path, DatasetFormat format) {
    if (format == DatasetFormat::Text01)
        save_text(d, path);
    else
        save_packed(d, path);
}

void split(BinaryDataset& d, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split: train fraction must be in (0,1)");
    const int n = d.size();
    const int ntrain = int(std::lround(train_fraction * n));
    if (ntrain == 0 || ntrain == n)
        throw std::invalid_argument("split: degenerate split (empty train or test side)");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(seed, 0xD5);
    for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[int(rng.below(std::uint64_t(i) + 1))]);
    d.in_train.assign(n, 0);
    for (int i = 0; i < ntrain; ++i) d.in_train[order[i]] = 1;
}

}  // namespace rbm
