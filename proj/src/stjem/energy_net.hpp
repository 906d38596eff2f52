// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stjem/core_math.hpp"

namespace stjem {

enum class Activation : std::uint8_t {
    SmoothSwish = 0,  // x * sigmoid(x); smooth everywhere, informative grad_input
    Tanh = 1,
    LeakyRelu = 2,  // negative slope 0.2
};

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation a);

// Which scalar the input gradient is taken of: a single class logit, or the
// marginal log sum_i exp(q_i).
struct GradHead {
    static GradHead marginal() { return GradHead{true, 0}; }
    static GradHead class_of(int i) { return GradHead{false, i}; }

    bool is_marginal;
    int class_index;
};

// Gradient of some scalar loss with respect to every network parameter, in
// the network's flat parameter layout.
struct ParamGradient {
    std::vector<double> values;

    double norm() const;
    void axpy(double a, const ParamGradient& other);  // this += a * other
    void scale(double a);
    double dot(const ParamGradient& other) const;
};

// Intermediate activations of one forward pass, reused by the backward
// passes so batch losses only run each forward once.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;  // a_0 = x, a_1, ..., a_{L-1}
    std::vector<std::vector<double>> pre;     // z_l = W_l a_l + b_l
    const std::vector<double>& logits() const { return pre.back(); }
};

// The vector-valued energy function f(x): R^Dx -> R^Dy. Output i is the
// negative energy of (x, y=i). A plain fully-connected net: linear layers
// with the chosen activation between them, no activation on the output.
class EnergyNetwork {
public:
    // Weights ~ Normal(0, 1/sqrt(fan_in)) from a SplitMix64 stream seeded
    // with `seed`; biases zero. Same (dims, activation, seed) gives a
    // bit-identical network.
    static EnergyNetwork init(const std::vector<int>& layer_dims, Activation activation,
                              std::uint64_t seed);

    int input_dim() const { return layer_dims_.front(); }
    int output_dim() const { return layer_dims_.back(); }
    const std::vector<int>& layer_dims() const { return layer_dims_; }
    Activation activation() const { return activation_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> params() const { return params_; }
    std::span<double> mutable_params() { return params_; }
    std::size_t param_count() const { return params_.size(); }

    Logits forward(std::span<const double> x) const;
    ForwardTrace forward_trace(std::span<const double> x) const;

    // d(upstream . f(x)) / d(params), by reverse accumulation.
    ParamGradient grad_params(std::span<const double> x, std::span<const double> upstream) const;
    ParamGradient grad_params(const ForwardTrace& trace, std::span<const double> upstream) const;
    // Accumulate into an existing gradient: grad += scale * d(upstream . f)/dtheta.
    void accumulate_grad_params(const ForwardTrace& trace, std::span<const double> upstream,
                                double scale, ParamGradient& grad) const;

    // d f(x)_i / dx (class head) or d logsumexp(f(x)) / dx (marginal head).
    std::vector<double> grad_input(std::span<const double> x, GradHead head) const;

    ParamGradient zero_gradient() const { return ParamGradient{std::vector<double>(params_.size(), 0.0)}; }

    void save(const std::string& path) const;
    void save(std::ostream& os) const;
    static EnergyNetwork load(const std::string& path);
    static EnergyNetwork load(std::istream& is);

    // Direct parameter placement for hand-built test fixtures.
    void set_weight(int layer, int row, int col, double v);
    void set_bias(int layer, int row, double v);
    double weight(int layer, int row, int col) const;
    double bias(int layer, int row) const;

private:
    EnergyNetwork() = default;

    std::size_t w_offset(int layer) const { return offsets_[2 * layer]; }
    std::size_t b_offset(int layer) const { return offsets_[2 * layer + 1]; }
    int n_weight_layers() const { return static_cast<int>(layer_dims_.size()) - 1; }
    void build_offsets();

    std::vector<int> layer_dims_;
    Activation activation_ = Activation::SmoothSwish;
    std::uint64_t seed_ = 0;
    std::vector<double> params_;        // per layer: row-major W then b
    std::vector<std::size_t> offsets_;  // [w0, b0, w1, b1, ...]
};

}  // namespace stjem
