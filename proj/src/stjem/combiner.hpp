// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stjem/core_math.hpp"
#include "stjem/data.hpp"
#include "stjem/energy_net.hpp"

namespace stjem {

// Likelihood-weighted combination of trained energy classifiers. Combining
// logits by logsumexp across members is, under equal partition functions,
// the average of the member joints: each member's posterior enters weighted
// by how likely it finds the input.
struct ModelEnsemble {
    std::vector<EnergyNetwork> members;
    ProbVector prior;  // p(y), used by combined_conditional_ll

    void validate() const;  // >= 1 member, shared dims, prior sums to 1
    int input_dim() const { return members.front().input_dim(); }
    int output_dim() const { return members.front().output_dim(); }
};

// Class prior from training label frequencies with add-one smoothing.
ProbVector prior_from_labels(std::span<const int> ys, int dy);

// Per class y: logsumexp over members of f_i(x)_y. The -log(kC) constant of
// the average is dropped; it cancels in every posterior.
Logits combine_logits(const ModelEnsemble& ensemble, std::span<const double> x);

// combine_logits(x)_y - log p(y). Meaningful up to a shared constant, like
// any conditional log-likelihood fed to a decoder.
std::vector<double> combined_conditional_ll(const ModelEnsemble& ensemble,
                                            std::span<const double> x);

struct CombinationRow {
    std::string dataset;
    std::string model_id;  // "member-i" or "combined"
    double accuracy;
    double ece;
};

// Each member alone and the combination, on every dataset.
std::vector<CombinationRow> evaluate_combination(const ModelEnsemble& ensemble,
                                                 const std::vector<Dataset>& datasets);

void write_combination_csv(const std::vector<CombinationRow>& rows, std::ostream& os);

}  // namespace stjem
