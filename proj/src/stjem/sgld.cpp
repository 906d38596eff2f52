// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/sgld.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "stjem/core_math.hpp"
#include "stjem/errors.hpp"

namespace stjem {

namespace {
constexpr double kDenoiseStepFloor = 1e-6;

std::vector<double> uniform_box_draw(int dim, Rng& rng) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform(kDataBoxLo, kDataBoxHi);
    return x;
}
}  // namespace

double target_energy(const EnergyNetwork& net, std::span<const double> x, GradHead target) {
    Logits q = net.forward(x);
    if (target.is_marginal) return logsumexp(q);
    if (target.class_index < 0 || target.class_index >= net.output_dim())
        throw std::invalid_argument("target_energy: class index out of range");
    return q[target.class_index];
}

int scheduled_steps(const SgldConfig& cfg, double epochs_elapsed) {
    if (cfg.schedule.kind == SgldSchedule::Kind::Fixed) return cfg.n_steps;
    int extra = static_cast<int>(std::floor(epochs_elapsed / cfg.schedule.steps_per_epoch_fraction));
    int steps = cfg.n_steps + std::max(0, extra);
    if (cfg.schedule.max_steps > 0) steps = std::min(steps, cfg.schedule.max_steps);
    return steps;
}

void ChainDiagnostics::write_csv(std::ostream& os) const {
    os << "step,energy,step_size\n";
    char buf[96];
    for (const ChainStep& s : steps) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", s.step, s.energy, s.step_size);
        os << buf;
    }
}

std::vector<double> sgld_step(const EnergyNetwork& net, std::span<const double> x,
                              const SgldConfig& cfg, Rng& rng, int step_index) {
    std::vector<double> grad = net.grad_input(x, cfg.target);
    for (double g : grad)
        if (!std::isfinite(g))
            throw sampler_divergence("non-finite input gradient", step_index);

    std::vector<double> next(x.size());
    const double half_step = 0.5 * cfg.step_size;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = x[i] + half_step * grad[i];
        if (cfg.noise_scale > 0.0) v += cfg.noise_scale * rng.normal();
        next[i] = std::clamp(v, kSgldClampLo, kSgldClampHi);
    }
    return next;
}

ChainResult run_chain(const EnergyNetwork& net, const SgldConfig& cfg, Rng& rng,
                      std::optional<std::vector<double>> x0, ReplayBuffer* buffer) {
    if (cfg.n_steps < 1) throw std::invalid_argument("run_chain: n_steps must be >= 1");

    std::vector<double> x;
    switch (cfg.init) {
        case SgldConfig::Init::Given:
            if (!x0) throw std::invalid_argument("run_chain: init=given requires x0");
            x = std::move(*x0);
            break;
        case SgldConfig::Init::UniformRandom:
            x = uniform_box_draw(net.input_dim(), rng);
            break;
        case SgldConfig::Init::Buffer:
            if (!buffer) throw std::invalid_argument("run_chain: init=buffer requires a buffer");
            x = std::move(buffer->sample(1)[0]);
            break;
    }
    if (static_cast<int>(x.size()) != net.input_dim())
        throw std::invalid_argument("run_chain: start dimension mismatch");

    ChainResult result;
    result.diagnostics.steps.reserve(cfg.n_steps);
    for (int t = 0; t < cfg.n_steps; ++t) {
        x = sgld_step(net, x, cfg, rng, t);
        double e = target_energy(net, x, cfg.target);
        if (!std::isfinite(e)) throw sampler_divergence("non-finite chain energy", t);
        result.diagnostics.steps.push_back({t, e, cfg.step_size});
    }
    result.sample = std::move(x);
    return result;
}

std::vector<double> denoise(const EnergyNetwork& net, std::span<const double> x_corrupted,
                            const SgldConfig& cfg) {
    std::vector<double> x(x_corrupted.begin(), x_corrupted.end());
    double energy = target_energy(net, x, cfg.target);
    if (!std::isfinite(energy)) throw sampler_divergence("non-finite energy at denoise start", 0);

    for (int t = 0; t < cfg.n_steps; ++t) {
        std::vector<double> grad = net.grad_input(x, cfg.target);
        for (double g : grad)
            if (!std::isfinite(g)) throw sampler_divergence("non-finite input gradient", t);

        double alpha = cfg.step_size;
        for (;;) {
            if (alpha < kDenoiseStepFloor) return x;  // no acceptable step left
            std::vector<double> cand(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                cand[i] = std::clamp(x[i] + 0.5 * alpha * grad[i], kSgldClampLo, kSgldClampHi);
            double cand_energy = target_energy(net, cand, cfg.target);
            if (cand_energy >= energy) {
                x = std::move(cand);
                energy = cand_energy;
                break;
            }
            alpha *= 0.5;
        }
    }
    return x;
}

ReplayBuffer::ReplayBuffer(int capacity, int dim, double reinit_prob, std::uint64_t seed)
    : capacity_(capacity), dim_(dim), reinit_prob_(reinit_prob), rng_(seed) {
    if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    if (dim < 1) throw std::invalid_argument("ReplayBuffer: dim must be positive");
    if (reinit_prob < 0.0 || reinit_prob > 1.0)
        throw std::invalid_argument("ReplayBuffer: reinit_prob outside [0, 1]");
}

std::vector<std::vector<double>> ReplayBuffer::sample(int n) {
    if (n <= 0) throw std::invalid_argument("ReplayBuffer::sample: n must be positive");
    std::vector<std::vector<double>> starts;
    starts.reserve(n);
    for (int i = 0; i < n; ++i) {
        bool fresh = entries_.empty() || rng_.next_double() < reinit_prob_;
        if (fresh) {
            starts.push_back(uniform_box_draw(dim_, rng_));
        } else {
            starts.push_back(entries_[rng_.next_below(entries_.size())]);
        }
    }
    return starts;
}

void ReplayBuffer::push(std::span<const std::vector<double>> samples) {
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != dim_)
            throw std::invalid_argument("ReplayBuffer::push: dimension mismatch");
        for (double v : s)
            if (!std::isfinite(v))
                throw std::invalid_argument("ReplayBuffer::push: non-finite sample");
        if (size() < capacity_) {
            entries_.push_back(s);
        } else {
            entries_[rng_.next_below(entries_.size())] = s;
        }
    }
}

void ReplayBuffer::restore_entries(std::vector<std::vector<double>> entries) {
    if (static_cast<int>(entries.size()) > capacity_)
        throw std::invalid_argument("ReplayBuffer::restore_entries: over capacity");
    for (const auto& s : entries)
        if (static_cast<int>(s.size()) != dim_)
            throw std::invalid_argument("ReplayBuffer::restore_entries: dimension mismatch");
    entries_ = std::move(entries);
}

}  // namespace stjem
