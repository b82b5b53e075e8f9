#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbm/linalg.hpp"

namespace rbm {

// Binary-unit convention shared by both layers of a model.
enum class Convention { ZeroOne, PlusMinus };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& s);

using State = std::vector<std::int8_t>;  // entries in {0,1} or {-1,+1}

struct Configuration {
    State v;
    State h;
};

// H(v,h) = -sum_{ia} v_i W_{ai} h_a - theta.v - eta.h
// Weights are stored hidden-major: row a of `w` couples hidden unit a to all
// visible units.  Parameters are immutable in spirit: samplers and trainers
// copy-and-replace rather than mutate shared models.
struct RbmModel {
    Mat w;        // Nh x Nv
    Vec vbias;    // theta, length Nv
    Vec hbias;    // eta, length Nh
    Convention conv = Convention::ZeroOne;
    int update_index = 0;  // training step this snapshot was taken at

    int nv() const { return w.cols; }
    int nh() const { return w.rows; }

    static RbmModel zeros(int nv, int nh, Convention c);
    void validate() const;  // dimensions consistent, all entries finite
};

// Numerically stable primitives (no overflow for |x| > 700).
double sigmoid(double x);
double softplus(double x);      // log(1 + e^x)
double log2cosh(double x);      // log(2 cosh x)

double spin_up(Convention c);    // value a unit takes when "on"
double spin_down(Convention c);

// Mean of a single unit given its total input x: sigmoid(x) for {0,1},
// tanh(x) for {-1,+1}.
double unit_mean(double x, Convention c);
// P(unit = up | input x): sigmoid(c x) with c = 1 ({0,1}) or 2 (+-1).
double unit_prob_up(double x, Convention c);

// Per-unit inputs: hidden_input(a) = (W v)_a + eta_a, visible_input(i) = (W^T h)_i + theta_i.
void hidden_inputs(const RbmModel& m, const State& v, Vec& out);
void visible_inputs(const RbmModel& m, const State& h, Vec& out);

double energy(const RbmModel& m, const Configuration& x);

// Marginal energy H(v) with the hidden layer summed out:
//   H(v) = -theta.v - sum_a log(1+exp((Wv)_a + eta_a))      ({0,1})
//   H(v) = -theta.v - sum_a log 2cosh((Wv)_a + eta_a)       (+-1)
double marginal_energy(const RbmModel& m, const State& v);
// Same with the visible layer summed out (used when enumerating hidden states).
double hidden_marginal_energy(const RbmModel& m, const State& h);

// p(h_a = up | v) for all hidden units; `visible_conditional` is symmetric.
Vec hidden_conditional(const RbmModel& m, const State& v);
Vec visible_conditional(const RbmModel& m, const State& h);

// Exact affine reparameterization between conventions.  The returned model
// satisfies H_out(x') = H_in(x) - energy_shift for corresponding states
// (x'_i = 2 x_i - 1 or its inverse), so Z_out = e^{shift} Z_in and the
// log-likelihood of corresponding datasets is preserved exactly.
struct ConvertedModel {
    RbmModel model;
    double energy_shift;
};
ConvertedModel convert_model(const RbmModel& m, Convention target);

State convert_state(const State& s, Convention from, Convention to);

// "RBM1" file format: text magic line, text metadata line, then binary
// little-endian float64 blocks theta, eta, W (row-major, hidden-major).
void save_model(const RbmModel& m, const std::string& path);
RbmModel load_model(const std::string& path);

}  // namespace rbm
