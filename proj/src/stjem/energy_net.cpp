// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/energy_net.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stjem/binio.hpp"
#include "stjem/errors.hpp"
#include "stjem/rng.hpp"

namespace stjem {

namespace {

constexpr char kMagic[] = "STJEMNET";
constexpr std::uint32_t kVersion = 1;
constexpr double kLeakySlope = 0.2;

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double act_value(Activation a, double z) {
    switch (a) {
        case Activation::SmoothSwish: return z * sigmoid(z);
        case Activation::Tanh: return std::tanh(z);
        case Activation::LeakyRelu: return z > 0.0 ? z : kLeakySlope * z;
    }
    throw std::invalid_argument("unknown activation");
}

double act_deriv(Activation a, double z) {
    switch (a) {
        case Activation::SmoothSwish: {
            double s = sigmoid(z);
            return s * (1.0 + z * (1.0 - s));
        }
        case Activation::Tanh: {
            double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::LeakyRelu: return z > 0.0 ? 1.0 : kLeakySlope;
    }
    throw std::invalid_argument("unknown activation");
}

}  // namespace

Activation activation_from_name(const std::string& name) {
    if (name == "smooth-swish") return Activation::SmoothSwish;
    if (name == "tanh") return Activation::Tanh;
    if (name == "leaky-relu") return Activation::LeakyRelu;
    throw std::invalid_argument("unknown activation: " + name);
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::SmoothSwish: return "smooth-swish";
        case Activation::Tanh: return "tanh";
        case Activation::LeakyRelu: return "leaky-relu";
    }
    return "?";
}

double ParamGradient::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

void ParamGradient::axpy(double a, const ParamGradient& other) {
    if (values.size() != other.values.size())
        throw std::invalid_argument("ParamGradient::axpy: shape mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += a * other.values[i];
}

void ParamGradient::scale(double a) {
    for (double& v : values) v *= a;
}

double ParamGradient::dot(const ParamGradient& other) const {
    if (values.size() != other.values.size())
        throw std::invalid_argument("ParamGradient::dot: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * other.values[i];
    return s;
}

void EnergyNetwork::build_offsets() {
    offsets_.clear();
    std::size_t at = 0;
    for (int l = 0; l + 1 < static_cast<int>(layer_dims_.size()); ++l) {
        offsets_.push_back(at);
        at += static_cast<std::size_t>(layer_dims_[l + 1]) * layer_dims_[l];
        offsets_.push_back(at);
        at += static_cast<std::size_t>(layer_dims_[l + 1]);
    }
    params_.assign(at, 0.0);
}

EnergyNetwork EnergyNetwork::init(const std::vector<int>& layer_dims, Activation activation,
                                  std::uint64_t seed) {
    if (layer_dims.size() < 2)
        throw std::invalid_argument("EnergyNetwork::init: need at least (Dx, Dy)");
    for (int d : layer_dims)
        if (d < 1) throw std::invalid_argument("EnergyNetwork::init: non-positive layer dim");

    EnergyNetwork net;
    net.layer_dims_ = layer_dims;
    net.activation_ = activation;
    net.seed_ = seed;
    net.build_offsets();

    Rng rng(seed);
    for (int l = 0; l < net.n_weight_layers(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        const double sd = 1.0 / std::sqrt(static_cast<double>(fan_in));
        double* w = net.params_.data() + net.w_offset(l);
        for (int i = 0; i < fan_out * fan_in; ++i) w[i] = rng.normal(0.0, sd);
        // biases stay zero
    }
    return net;
}

ForwardTrace EnergyNetwork::forward_trace(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim())
        throw std::invalid_argument("forward: input dimension mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");

    ForwardTrace t;
    const int L = n_weight_layers();
    t.inputs.reserve(L);
    t.pre.reserve(L);
    std::vector<double> a(x.begin(), x.end());
    for (int l = 0; l < L; ++l) {
        const int in = layer_dims_[l];
        const int out = layer_dims_[l + 1];
        const double* w = params_.data() + w_offset(l);
        const double* b = params_.data() + b_offset(l);
        std::vector<double> z(out);
        for (int i = 0; i < out; ++i) {
            double s = b[i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) s += row[j] * a[j];
            z[i] = s;
        }
        t.inputs.push_back(std::move(a));
        if (l + 1 < L) {
            a.resize(out);
            for (int i = 0; i < out; ++i) a[i] = act_value(activation_, z[i]);
        }
        t.pre.push_back(std::move(z));
    }
    return t;
}

Logits EnergyNetwork::forward(std::span<const double> x) const {
    return forward_trace(x).pre.back();
}

ParamGradient EnergyNetwork::grad_params(std::span<const double> x,
                                         std::span<const double> upstream) const {
    return grad_params(forward_trace(x), upstream);
}

ParamGradient EnergyNetwork::grad_params(const ForwardTrace& trace,
                                         std::span<const double> upstream) const {
    ParamGradient g = zero_gradient();
    accumulate_grad_params(trace, upstream, 1.0, g);
    return g;
}

void EnergyNetwork::accumulate_grad_params(const ForwardTrace& trace,
                                           std::span<const double> upstream, double scale,
                                           ParamGradient& grad) const {
    const int L = n_weight_layers();
    if (static_cast<int>(upstream.size()) != output_dim())
        throw std::invalid_argument("grad_params: upstream dimension mismatch");
    if (grad.values.size() != params_.size())
        throw std::invalid_argument("grad_params: gradient shape mismatch");
    for (double v : upstream)
        if (!std::isfinite(v)) throw std::invalid_argument("grad_params: non-finite upstream");

    std::vector<double> delta(upstream.begin(), upstream.end());
    for (int l = L - 1; l >= 0; --l) {
        const int in = layer_dims_[l];
        const int out = layer_dims_[l + 1];
        const std::vector<double>& a = trace.inputs[l];
        double* gw = grad.values.data() + w_offset(l);
        double* gb = grad.values.data() + b_offset(l);
        for (int i = 0; i < out; ++i) {
            const double d = scale * delta[i];
            double* row = gw + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) row[j] += d * a[j];
            gb[i] += d;
        }
        if (l > 0) {
            const double* w = params_.data() + w_offset(l);
            std::vector<double> prev(in, 0.0);
            for (int i = 0; i < out; ++i) {
                const double d = delta[i];
                const double* row = w + static_cast<std::size_t>(i) * in;
                for (int j = 0; j < in; ++j) prev[j] += d * row[j];
            }
            const std::vector<double>& z_prev = trace.pre[l - 1];
            for (int j = 0; j < in; ++j) prev[j] *= act_deriv(activation_, z_prev[j]);
            delta = std::move(prev);
        }
    }
}

std::vector<double> EnergyNetwork::grad_input(std::span<const double> x, GradHead head) const {
    ForwardTrace trace = forward_trace(x);
    const int L = n_weight_layers();

    std::vector<double> delta;
    if (head.is_marginal) {
        delta = softmax(trace.logits());  // d logsumexp(q)/dq = softmax(q)
    } else {
        if (head.class_index < 0 || head.class_index >= output_dim())
            throw std::invalid_argument("grad_input: class index out of range");
        delta.assign(output_dim(), 0.0);
        delta[head.class_index] = 1.0;
    }

    for (int l = L - 1; l >= 0; --l) {
        const int in = layer_dims_[l];
        const int out = layer_dims_[l + 1];
        const double* w = params_.data() + w_offset(l);
        std::vector<double> prev(in, 0.0);
        for (int i = 0; i < out; ++i) {
            const double d = delta[i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) prev[j] += d * row[j];
        }
        if (l > 0) {
            const std::vector<double>& z_prev = trace.pre[l - 1];
            for (int j = 0; j < in; ++j) prev[j] *= act_deriv(activation_, z_prev[j]);
        }
        delta = std::move(prev);
    }
    return delta;
}

void EnergyNetwork::save(std::ostream& os) const {
    os.write(kMagic, 8);
    binio::put_u32(os, kVersion);
    binio::put_u8(os, static_cast<std::uint8_t>(activation_));
    binio::put_u32(os, static_cast<std::uint32_t>(layer_dims_.size()));
    for (int d : layer_dims_) binio::put_u32(os, static_cast<std::uint32_t>(d));
    binio::put_u64(os, seed_);
    for (double v : params_) binio::put_f64(os, v);
}

void EnergyNetwork::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    save(os);
    if (!os) throw io_error("write failed: " + path);
}

EnergyNetwork EnergyNetwork::load(std::istream& is) {
    binio::Reader r(is);
    r.expect_magic(kMagic, "energy net checkpoint");
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw format_error("energy net checkpoint: unsupported version " + std::to_string(version),
                           r.offset());
    std::uint8_t act = r.u8();
    if (act > 2) throw format_error("energy net checkpoint: bad activation code", r.offset());
    std::uint32_t n_dims = r.u32();
    if (n_dims < 2 || n_dims > 64)
        throw format_error("energy net checkpoint: implausible layer count", r.offset());
    std::vector<int> dims(n_dims);
    for (auto& d : dims) {
        std::uint32_t v = r.u32();
        if (v == 0 || v > (1u << 24))
            throw format_error("energy net checkpoint: bad layer dim", r.offset());
        d = static_cast<int>(v);
    }

    EnergyNetwork net;
    net.layer_dims_ = dims;
    net.activation_ = static_cast<Activation>(act);
    net.build_offsets();
    net.seed_ = r.u64();
    for (double& v : net.params_) v = r.f64();
    return net;
}

EnergyNetwork EnergyNetwork::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    EnergyNetwork net = load(is);
    if (is.peek() != std::char_traits<char>::eof())
        throw format_error("energy net checkpoint: trailing bytes",
                           static_cast<std::size_t>(is.tellg()));
    return net;
}

void EnergyNetwork::set_weight(int layer, int row, int col, double v) {
    params_.at(w_offset(layer) + static_cast<std::size_t>(row) * layer_dims_[layer] + col) = v;
}

void EnergyNetwork::set_bias(int layer, int row, double v) {
    params_.at(b_offset(layer) + row) = v;
}

double EnergyNetwork::weight(int layer, int row, int col) const {
    return params_.at(w_offset(layer) + static_cast<std::size_t>(row) * layer_dims_[layer] + col);
}

double EnergyNetwork::bias(int layer, int row) const {
    return params_.at(b_offset(layer) + row);
}

}  // namespace stjem
