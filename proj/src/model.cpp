#include "rbm/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rbm {

std::string to_string(Convention c) {
    return c == Convention::ZeroOne ? "zeroone" : "plusminus";
}

Convention convention_from_string(const std::string& s) {
    if (s == "zeroone" || s == "01") return Convention::ZeroOne;
    if (s == "plusminus" || s == "pm") return Convention::PlusMinus;
    throw std::invalid_argument("unknown convention: " + s);
}

RbmModel RbmModel::zeros(int nv, int nh, Convention c) {
    RbmModel m;
    m.w = Mat(nh, nv, 0.0);
    m.vbias.assign(nv, 0.0);
    m.hbias.assign(nh, 0.0);
    m.conv = c;
    return m;
}

void RbmModel::validate() const {
    if (int(vbias.size()) != w.cols || int(hbias.size()) != w.rows)
        throw std::invalid_argument("RbmModel: bias lengths do not match weight matrix");
    for (double x : w.a)
        if (!std::isfinite(x)) throw std::invalid_argument("RbmModel: non-finite weight");
    for (double x : vbias)
        if (!std::isfinite(x)) throw std::invalid_argument("RbmModel: non-finite visible bias");
    for (double x : hbias)
        if (!std::isfinite(x)) throw std::invalid_argument("RbmModel: non-finite hidden bias");
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double log2cosh(double x) {
    return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x)));
}

double spin_up(Convention) { return 1.0; }
double spin_down(Convention c) { return c == Convention::ZeroOne ? 0.0 : -1.0; }

double unit_mean(double x, Convention c) {
    return c == Convention::ZeroOne ? sigmoid(x) : std::tanh(x);
}

double unit_prob_up(double x, Convention c) {
    return sigmoid(c == Convention::ZeroOne ? x : 2.0 * x);
}

void hidden_inputs(const RbmModel& m, const State& v, Vec& out) {
    const int nh = m.nh(), nv = m.nv();
    if (int(v.size()) != nv) throw std::invalid_argument("hidden_inputs: dimension mismatch");
    out.resize(nh);
    for (int a = 0; a < nh; ++a) {
        const double* wa = m.w.row(a);
        double s = m.hbias[a];
        for (int i = 0; i < nv; ++i) s += wa[i] * v[i];
        out[a] = s;
    }
}

void visible_inputs(const RbmModel& m, const State& h, Vec& out) {
    const int nh = m.nh(), nv = m.nv();
    if (int(h.size()) != nh) throw std::invalid_argument("visible_inputs: dimension mismatch");
    out.assign(nv, 0.0);
    for (int a = 0; a < nh; ++a) {
        if (h[a] == 0) continue;
        const double* wa = m.w.row(a);
        const double ha = h[a];
        for (int i = 0; i < nv; ++i) out[i] += wa[i] * ha;
    }
    for (int i = 0; i < nv; ++i) out[i] += m.vbias[i];
}

double energy(const RbmModel& m, const Configuration& x) {
    const int nh = m.nh(), nv = m.nv();
    if (int(x.v.size()) != nv || int(x.h.size()) != nh)
        throw std::invalid_argument("energy: dimension mismatch");
    double e = 0.0;
    for (int a = 0; a < nh; ++a) {
        if (x.h[a] == 0) continue;
        const double* wa = m.w.row(a);
        double s = 0.0;
        for (int i = 0; i < nv; ++i) s += wa[i] * x.v[i];
        e -= s * x.h[a];
    }
    for (int i = 0; i < nv; ++i) e -= m.vbias[i] * x.v[i];
    for (int a = 0; a < nh; ++a) e -= m.hbias[a] * x.h[a];
    return e;
}

double marginal_energy(const RbmModel& m, const State& v) {
    Vec in;
    hidden_inputs(m, v, in);
    double e = 0.0;
    for (int i = 0; i < m.nv(); ++i) e -= m.vbias[i] * v[i];
    if (m.conv == Convention::ZeroOne)
        for (double x : in) e -= softplus(x);
    else
        for (double x : in) e -= log2cosh(x);
    return e;
}

double hidden_marginal_energy(const RbmModel& m, const State& h) {
    Vec in;
    visible_inputs(m, h, in);
    double e = 0.0;
    for (int a = 0; a < m.nh(); ++a) e -= m.hbias[a] * h[a];
    if (m.conv == Convention::ZeroOne)
        for (double x : in) e -= softplus(x);
    else
        for (double x : in) e -= log2cosh(x);
    return e;
}

Vec hidden_conditional(const RbmModel& m, const State& v) {
    Vec in;
    hidden_inputs(m, v, in);
    for (double& x : in) x = unit_prob_up(x, m.conv);
    return in;
}

Vec visible_conditional(const RbmModel& m, const State& h) {
    Vec in;
    visible_inputs(m, h, in);
    for (double& x : in) x = unit_prob_up(x, m.conv);
    return in;
}

ConvertedModel convert_model(const RbmModel& m, Convention target) {
    m.validate();
    if (m.conv == target) return {m, 0.0};
    const int nv = m.nv(), nh = m.nh();
    RbmModel out = RbmModel::zeros(nv, nh, target);
    out.update_index = m.update_index;
    double shift = 0.0;
    if (m.conv == Convention::ZeroOne) {
        // v = (1+s)/2, h = (1+sig)/2
        double wsum = 0.0, tsum = 0.0, esum = 0.0;
        Vec colsum(nv, 0.0);
        for (int a = 0; a < nh; ++a) {
            double rowsum = 0.0;
            for (int i = 0; i < nv; ++i) {
                const double wai = m.w(a, i);
                out.w(a, i) = wai / 4.0;
                rowsum += wai;
                colsum[i] += wai;
                wsum += wai;
            }
            out.hbias[a] = m.hbias[a] / 2.0 + rowsum / 4.0;
            esum += m.hbias[a];
        }
        for (int i = 0; i < nv; ++i) {
            out.vbias[i] = m.vbias[i] / 2.0 + colsum[i] / 4.0;
            tsum += m.vbias[i];
        }
        shift = -wsum / 4.0 - tsum / 2.0 - esum / 2.0;
    } else {
        // s = 2v - 1, sig = 2h - 1
        double wsum = 0.0, tsum = 0.0, esum = 0.0;
        Vec colsum(nv, 0.0);
        for (int a = 0; a < nh; ++a) {
            double rowsum = 0.0;
            for (int i = 0; i < nv; ++i) {
                const double wai = m.w(a, i);
                out.w(a, i) = 4.0 * wai;
                rowsum += wai;
                colsum[i] += wai;
                wsum += wai;
            }
            out.hbias[a] = 2.0 * m.hbias[a] - 2.0 * rowsum;
            esum += m.hbias[a];
        }
        for (int i = 0; i < nv; ++i) {
            out.vbias[i] = 2.0 * m.vbias[i] - 2.0 * colsum[i];
            tsum += m.vbias[i];
        }
        shift = -wsum + tsum + esum;
    }
    return {out, shift};
}

State convert_state(const State& s, Convention from, Convention to) {
    if (from == to) return s;
    State out(s.size());
    if (from == Convention::ZeroOne)
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::int8_t(2 * s[i] - 1);
    else
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::int8_t((s[i] + 1) / 2);
    return out;
}

namespace {

void write_f64_block(std::ofstream& f, const double* p, std::size_t n) {
    f.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
}

void read_f64_block(std::ifstream& f, double* p, std::size_t n, const std::string& what) {
    f.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
    if (std::size_t(f.gcount()) != n * sizeof(double))
        throw std::runtime_error("RBM1: truncated payload reading " + what);
}

}  // namespace

void save_model(const RbmModel& m, const std::string& path) {
    m.validate();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "RBM1\n";
    f << "nv=" << m.nv() << " nh=" << m.nh() << " convention=" << to_string(m.conv)
      << " t=" << m.update_index << "\n";
    write_f64_block(f, m.vbias.data(), m.vbias.size());
    write_f64_block(f, m.hbias.data(), m.hbias.size());
    write_f64_block(f, m.w.a.data(), m.w.a.size());
    if (!f) throw std::runtime_error("write failed: " + path);
}

RbmModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    std::getline(f, magic);
    if (magic != "RBM1") throw std::runtime_error("RBM1: bad magic in " + path);
    std::string meta;
    std::getline(f, meta);
    int nv = -1, nh = -1, t = 0;
    Convention conv = Convention::ZeroOne;
    std::istringstream ms(meta);
    std::string tok;
    while (ms >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::runtime_error("RBM1: malformed metadata: " + tok);
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "nv") nv = std::stoi(v);
        else if (k == "nh") nh = std::stoi(v);
        else if (k == "convention") conv = convention_from_string(v);
        else if (k == "t") t = std::stoi(v);
        // unknown keys ignored for forward compatibility
    }
    if (nv <= 0 || nh <= 0) throw std::runtime_error("RBM1: missing or invalid dimensions");
    RbmModel m = RbmModel::zeros(nv, nh, conv);
    m.update_index = t;
    read_f64_block(f, m.vbias.data(), m.vbias.size(), "theta");
    read_f64_block(f, m.hbias.data(), m.hbias.size(), "eta");
    read_f64_block(f, m.w.a.data(), m.w.a.size(), "W");
    m.validate();
    return m;
}

}  // namespace rbm
