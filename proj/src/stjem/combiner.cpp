// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/combiner.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "stjem/trainer.hpp"

namespace stjem {

void ModelEnsemble::validate() const {
    if (members.empty()) throw std::invalid_argument("ModelEnsemble: no members");
    const int dx = members.front().input_dim();
    const int dy = members.front().output_dim();
    for (const EnergyNetwork& m : members)
        if (m.input_dim() != dx || m.output_dim() != dy)
            throw std::invalid_argument("ModelEnsemble: member dimensions differ");
    if (static_cast<int>(prior.size()) != dy)
        throw std::invalid_argument("ModelEnsemble: prior size mismatch");
    double sum = 0.0;
    for (double p : prior) {
        if (p < 0.0) throw std::invalid_argument("ModelEnsemble: negative prior entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("ModelEnsemble: prior does not sum to 1");
}

ProbVector prior_from_labels(std::span<const int> ys, int dy) {
    if (dy < 1) throw std::invalid_argument("prior_from_labels: dy must be positive");
    std::vector<double> counts(dy, 1.0);  // add-one smoothing
    for (int y : ys) {
        if (y < 0 || y >= dy) throw std::invalid_argument("prior_from_labels: label out of range");
        counts[y] += 1.0;
    }
    const double total = static_cast<double>(ys.size()) + dy;
    for (double& c : counts) c /= total;
    return counts;
}

Logits combine_logits(const ModelEnsemble& ensemble, std::span<const double> x) {
    ensemble.validate();
    if (static_cast<int>(x.size()) != ensemble.input_dim())
        throw std::invalid_argument("combine_logits: input dimension mismatch");

    const int dy = ensemble.output_dim();
    std::vector<Logits> member_logits;
    member_logits.reserve(ensemble.members.size());
    for (const EnergyNetwork& m : ensemble.members) member_logits.push_back(m.forward(x));

    Logits combined(dy);
    std::vector<double> column(ensemble.members.size());
    for (int y = 0; y < dy; ++y) {
        for (std::size_t i = 0; i < member_logits.size(); ++i) column[i] = member_logits[i][y];
        combined[y] = logsumexp(column);
    }
    return combined;
}

std::vector<double> combined_conditional_ll(const ModelEnsemble& ensemble,
                                            std::span<const double> x) {
    for (double p : ensemble.prior)
        if (p <= 0.0)
            throw std::invalid_argument("combined_conditional_ll: prior must be strictly positive");
    Logits combined = combine_logits(ensemble, x);
    for (int y = 0; y < static_cast<int>(combined.size()); ++y)
        combined[y] -= std::log(ensemble.prior[y]);
    return combined;
}

std::vector<CombinationRow> evaluate_combination(const ModelEnsemble& ensemble,
                                                 const std::vector<Dataset>& datasets) {
    ensemble.validate();
    if (datasets.empty()) throw std::invalid_argument("evaluate_combination: no datasets");

    std::vector<CombinationRow> rows;
    for (const Dataset& d : datasets) {
        if (d.dx != ensemble.input_dim() || d.dy != ensemble.output_dim())
            throw std::invalid_argument("evaluate_combination: dataset dimensions mismatch");
        for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
            EvalResult r = evaluate(ensemble.members[i], d);
            rows.push_back({d.name, "member-" + std::to_string(i), r.accuracy, r.ece});
        }
        EvalResult r = evaluate_logits_fn(
            [&](std::span<const double> x) { return combine_logits(ensemble, x); }, d);
        rows.push_back({d.name, "combined", r.accuracy, r.ece});
    }
    return rows;
}

void write_combination_csv(const std::vector<CombinationRow>& rows, std::ostream& os) {
    os << "dataset,model_id,accuracy,ece\n";
    char buf[96];
    for (const CombinationRow& r : rows) {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", r.accuracy, r.ece);
        os << r.dataset << "," << r.model_id << buf;
    }
}

}  // namespace stjem
