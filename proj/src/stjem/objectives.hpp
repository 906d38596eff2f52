// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "stjem/core_math.hpp"
#include "stjem/energy_net.hpp"

namespace stjem {

// One training batch: N positives, with labels valid where labeled_mask is
// set, plus M model samples (SGLD chain end states) as negatives. M = 0 is
// legal everywhere and turns the generative term into RES-JEM.
struct Batch {
    int n = 0;
    int dx = 0;
    std::vector<double> xs;            // n * dx, row-major
    std::vector<int> ys;               // n; meaningful where labeled
    std::vector<bool> labeled_mask;    // n
    int m = 0;
    std::vector<double> negatives;     // m * dx, row-major

    std::span<const double> row(int i) const { return {xs.data() + static_cast<std::size_t>(i) * dx, static_cast<std::size_t>(dx)}; }
    std::span<const double> negative(int j) const { return {negatives.data() + static_cast<std::size_t>(j) * dx, static_cast<std::size_t>(dx)}; }
    int labeled_count() const;
    int unlabeled_count() const { return n - labeled_count(); }
    void validate(int dy) const;
};

struct LossPart {
    double value = 0.0;
    ParamGradient grad;
};

struct LossReport {
    double xent = 0.0;
    double gen_term = 0.0;
    double unlabeled_term = 0.0;
    double samples_xent_term = 0.0;
    double total = 0.0;
    double grad_norm = 0.0;
    int candidate_count = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

struct ObjectiveConfig {
    double xent_weight = 1.0;
    double gen_weight = 1.0;
    double unlabeled_weight = 0.5;
    double samples_xent_weight = 0.0;
    bool use_gen = true;
    bool use_unlabeled = false;
    bool use_samples_xent = false;
    // Default treats the posterior weights of the unlabeled objective as
    // constants (stop-gradient); flipping this differentiates through them.
    bool differentiate_posterior_weights = false;
};

// Mean -log p(y|x) over the labeled rows; gradient via softmax-minus-onehot.
LossPart xent_loss(const EnergyNetwork& net, const Batch& batch);

// The stabilized generative term. For each labeled positive (x, y) the
// candidate set is every batch row (the positive itself anchors the
// denominator) plus every negative, and the term is
//   -log [ exp(f(x)_y) / sum_{x' in C} exp(f(x')_y) ],
// averaged over positives. Always >= 0; the anchor keeps the candidate
// softmax of the positive strictly positive, so non-competitive negatives
// drive both the value and the gradient to zero instead of blowing up.
LossPart stjem_generative_term(const EnergyNetwork& net, const Batch& batch);

// stjem_generative_term with the negatives stripped: the candidate set is
// the mini-batch alone, i.e. the model's domain restricted to data points.
LossPart res_jem_term(const EnergyNetwork& net, const Batch& batch);

// Unlabeled objective: for each row with labeled_mask false,
//   sum_y p(y|x) * [ -log p(y|x) + gen_term_per_class(x, y) ],
// averaged over unlabeled rows and returned as a loss. The per-class
// generative term reuses the same candidate machinery as
// stjem_generative_term.
LossPart unlabeled_term(const EnergyNetwork& net, const Batch& batch,
                        bool differentiate_posterior_weights = false);

// Mean -log p(y_target | x_sample) over conditionally generated samples.
LossPart samples_xent_term(const EnergyNetwork& net, std::span<const double> samples, int dx,
                           std::span<const int> target_classes);

// Weighted assembly of all active terms plus the summed gradient.
std::pair<LossReport, ParamGradient> total_loss(const EnergyNetwork& net, const Batch& batch,
                                                const ObjectiveConfig& cfg,
                                                std::span<const int> negative_classes = {});

// Mutual-information diagnostic over an empirical joint built from N
// posterior rows: I = E_x E_{y|x}[log p(y|x)] + H(mean posterior).
// Diagnostic only; no gradient.
struct MiDiagnostic {
    double mi = 0.0;
    double mean_log_posterior = 0.0;
    double marginal_entropy = 0.0;
};
MiDiagnostic mi_diagnostic(const std::vector<ProbVector>& posteriors);

}  // namespace stjem
