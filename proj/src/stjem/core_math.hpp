// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace stjem {

// Class scores q where q_i is the negative energy of (x, y=i). Plain vector;
// callers are responsible for keeping entries finite.
using Logits = std::vector<double>;

// Entries in (0, 1], summing to 1 within 1e-9 when produced by softmax().
using ProbVector = std::vector<double>;

// log sum_i exp(v_i), max-subtracted so arbitrarily large inputs never
// overflow. Throws std::invalid_argument on empty or NaN input.
double logsumexp(std::span<const double> values);

// SM(z)_i = exp(z_i) / sum_j exp(z_j). Shift-invariant: softmax(z + c) ==
// softmax(z). Throws std::invalid_argument on empty or NaN input.
ProbVector softmax(std::span<const double> z);

// The EBM posterior p(y|x) from logits q. Identical to softmax: the
// partition constant cancels between numerator and denominator, so the
// posterior never needs it.
ProbVector posterior_from_logits(std::span<const double> q);

// Index of the largest entry; ties broken by lowest index.
int argmax(std::span<const double> v);

// Expected calibration error with equal-width binning on [0, 1]. Empty bins
// contribute nothing. confidences[i] in [0, 1] is the model's confidence for
// prediction i, correct[i] whether it was right.
double ece(std::span<const double> confidences, const std::vector<bool>& correct, int n_bins);

inline constexpr int kDefaultEceBins = 15;

}  // namespace stjem
