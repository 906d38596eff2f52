// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace stjem {

// The project-wide PRNG: SplitMix64 (Steele, Lea & Flood 2014).
//
// Chosen over std engines because the whole state is a single uint64 —
// trivially serialized into checkpoints — and because independent streams
// can be split off deterministically. Normal draws use Box-Muller and
// consume exactly two uniforms each, so replaying a stream from a saved
// state is exact with no hidden distribution state.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller; the sine branch is discarded so every
    // draw advances the state by exactly two steps.
    double normal() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free modulo is biased for huge n; fine for n << 2^64.
        return next_u64() % n;
    }

    // Derive an independent stream. The child is a pure function of the
    // current seed/state and the stream id, so streams created with distinct
    // ids never overlap in practice.
    Rng split(std::uint64_t stream_id) const {
        Rng mixer(state_ ^ (0x6a09e667f3bcc909ULL + stream_id));
        return Rng(mixer.next_u64());
    }

    std::uint64_t state() const noexcept { return state_; }
    void set_state(std::uint64_t s) noexcept { state_ = s; }

    friend bool operator==(const Rng& a, const Rng& b) { return a.state_ == b.state_; }

private:
    std::uint64_t state_;
};

}  // namespace stjem
