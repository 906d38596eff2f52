// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "stjem/energy_net.hpp"
#include "stjem/rng.hpp"

namespace stjem {

// Features are normalized to [-1, 1]; SGLD iterates are clamped a little
// wider so chains cannot wander into regions the network never saw.
inline constexpr double kDataBoxLo = -1.0;
inline constexpr double kDataBoxHi = 1.0;
inline constexpr double kSgldClampLo = -1.2;
inline constexpr double kSgldClampHi = 1.2;

struct SgldSchedule {
    enum class Kind { Fixed, LinearIncrease };
    Kind kind = Kind::Fixed;
    // LinearIncrease: +1 step every this fraction of an epoch.
    double steps_per_epoch_fraction = 0.1;
    int max_steps = 0;  // 0 = no cap
};

struct SgldConfig {
    double step_size = 1.0;    // alpha
    double noise_scale = 0.01; // sigma; decoupled from alpha on purpose
    int n_steps = 20;          // T
    GradHead target = GradHead::marginal();
    enum class Init { UniformRandom, Buffer, Given };
    Init init = Init::Buffer;
    SgldSchedule schedule{};
};

// f(x)_i for a class target, logsumexp(f(x)) for the marginal target.
double target_energy(const EnergyNetwork& net, std::span<const double> x, GradHead target);

// Number of SGLD steps after `epochs_elapsed` epochs of training.
int scheduled_steps(const SgldConfig& cfg, double epochs_elapsed);

struct ChainStep {
    int step;
    double energy;
    double step_size;
};

struct ChainDiagnostics {
    std::vector<ChainStep> steps;
    void write_csv(std::ostream& os) const;
};

// One Langevin step: x + (alpha/2) * grad_x f + Normal(0, sigma^2) noise per
// coordinate, clamped to the SGLD box. Throws sampler_divergence (carrying
// `step_index`) if the gradient is non-finite.
std::vector<double> sgld_step(const EnergyNetwork& net, std::span<const double> x,
                              const SgldConfig& cfg, Rng& rng, int step_index = 0);

class ReplayBuffer;

// Run cfg.n_steps SGLD steps. Start from x0 (init=Given), a fresh uniform
// draw over the data box (init=UniformRandom), or a buffer draw
// (init=Buffer; `buffer` required). Diagnostics record the target energy
// after every step.
struct ChainResult {
    std::vector<double> sample;
    ChainDiagnostics diagnostics;
};
ChainResult run_chain(const EnergyNetwork& net, const SgldConfig& cfg, Rng& rng,
                      std::optional<std::vector<double>> x0 = std::nullopt,
                      ReplayBuffer* buffer = nullptr);

// Greedy zero-noise chain with per-step backtracking: a step is only
// accepted if the target energy does not decrease; otherwise the step size
// is halved and retried. Once the step size falls below 1e-6 the procedure
// stops. The result never has lower target energy than the input.
std::vector<double> denoise(const EnergyNetwork& net, std::span<const double> x_corrupted,
                            const SgldConfig& cfg);

// Persistent sample store for PCD. Chain end states are pushed back in and
// most chains restart from a stored sample; a small reinit probability keeps
// fresh uniform starts in the mix.
class ReplayBuffer {
public:
    ReplayBuffer(int capacity, int dim, double reinit_prob, std::uint64_t seed);

    // Each start is, independently with probability reinit_prob (or always,
    // while the buffer is empty), a fresh uniform draw over the data box;
    // otherwise a uniformly chosen stored entry. Throws on n <= 0.
    std::vector<std::vector<double>> sample(int n);

    // Appends until full, then overwrites uniformly chosen slots.
    void push(std::span<const std::vector<double>> samples);

    int size() const { return static_cast<int>(entries_.size()); }
    int capacity() const { return capacity_; }
    int dim() const { return dim_; }
    double reinit_prob() const { return reinit_prob_; }

    const std::vector<std::vector<double>>& entries() const { return entries_; }
    void restore_entries(std::vector<std::vector<double>> entries);
    std::uint64_t rng_state() const { return rng_.state(); }
    void set_rng_state(std::uint64_t s) { rng_.set_state(s); }

private:
    int capacity_;
    int dim_;
    double reinit_prob_;
    Rng rng_;
    std::vector<std::vector<double>> entries_;
};

}  // namespace stjem
