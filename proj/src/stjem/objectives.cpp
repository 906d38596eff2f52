// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/objectives.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace stjem {

int Batch::labeled_count() const {
    int c = 0;
    for (bool b : labeled_mask) c += b ? 1 : 0;
    return c;
}

void Batch::validate(int dy) const {
    if (n < 1) throw std::invalid_argument("Batch: need at least one example");
    if (dx < 1) throw std::invalid_argument("Batch: dx must be positive");
    if (xs.size() != static_cast<std::size_t>(n) * dx ||
        ys.size() != static_cast<std::size_t>(n) || labeled_mask.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("Batch: inconsistent field sizes");
    if (negatives.size() != static_cast<std::size_t>(m) * dx)
        throw std::invalid_argument("Batch: inconsistent negatives size");
    for (double v : xs)
        if (!std::isfinite(v)) throw std::invalid_argument("Batch: non-finite example");
    for (double v : negatives)
        if (!std::isfinite(v)) throw std::invalid_argument("Batch: non-finite negative");
    for (int i = 0; i < n; ++i)
        if (labeled_mask[i] && (ys[i] < 0 || ys[i] >= dy))
            throw std::invalid_argument("Batch: label out of range");
}

std::string LossReport::csv_header() {
    return "xent,gen,unlabeled,samples_xent,total,grad_norm,candidate_count";
}

std::string LossReport::csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d", xent, gen_term,
                  unlabeled_term, samples_xent_term, total, grad_norm, candidate_count);
    return buf;
}

namespace {

// Forward traces and per-class candidate logsumexps shared by the losses:
// candidates are the N batch rows followed by the M negatives.
struct CandidateSet {
    std::vector<ForwardTrace> traces;       // n + m entries
    std::vector<double> lse_per_class;      // dy
    int n = 0, m = 0, dy = 0;

    const Logits& logits(int c) const { return traces[c].logits(); }
    int count() const { return n + m; }
    // Softmax weight of candidate c within class y's candidate set.
    double weight(int c, int y) const { return std::exp(logits(c)[y] - lse_per_class[y]); }
};

CandidateSet build_candidates(const EnergyNetwork& net, const Batch& batch, bool include_negatives) {
    CandidateSet set;
    set.n = batch.n;
    set.m = include_negatives ? batch.m : 0;
    set.dy = net.output_dim();
    set.traces.reserve(set.count());
    for (int i = 0; i < batch.n; ++i) set.traces.push_back(net.forward_trace(batch.row(i)));
    for (int j = 0; j < set.m; ++j) set.traces.push_back(net.forward_trace(batch.negative(j)));

    set.lse_per_class.resize(set.dy);
    std::vector<double> column(set.count());
    for (int y = 0; y < set.dy; ++y) {
        for (int c = 0; c < set.count(); ++c) column[c] = set.logits(c)[y];
        set.lse_per_class[y] = logsumexp(column);
    }
    return set;
}

// Upstream accumulator, one Dy-row per candidate, materialized into a
// ParamGradient with a single backward pass per candidate.
struct UpstreamMatrix {
    explicit UpstreamMatrix(const CandidateSet& set)
        : dy(set.dy), rows(static_cast<std::size_t>(set.count()) * set.dy, 0.0) {}

    double* row(int c) { return rows.data() + static_cast<std::size_t>(c) * dy; }
    int dy;
    std::vector<double> rows;
};

void materialize(const EnergyNetwork& net, const CandidateSet& set, UpstreamMatrix& up,
                 ParamGradient& grad) {
    std::vector<double> u(set.dy);
    for (int c = 0; c < set.count(); ++c) {
        const double* r = up.row(c);
        bool nonzero = false;
        for (int y = 0; y < set.dy; ++y) {
            u[y] = r[y];
            nonzero = nonzero || u[y] != 0.0;
        }
        if (nonzero) net.accumulate_grad_params(set.traces[c], u, 1.0, grad);
    }
}

double generative_value_and_upstream(const CandidateSet& set, const Batch& batch,
                                     UpstreamMatrix& up) {
    int n_pos = batch.labeled_count();
    if (n_pos == 0) return 0.0;
    const double inv = 1.0 / n_pos;
    double value = 0.0;
    for (int i = 0; i < batch.n; ++i) {
        if (!batch.labeled_mask[i]) continue;
        const int y = batch.ys[i];
        value += set.lse_per_class[y] - set.logits(i)[y];
        for (int c = 0; c < set.count(); ++c) up.row(c)[y] += inv * set.weight(c, y);
        up.row(i)[y] -= inv;
    }
    return value * inv;
}

double unlabeled_value_and_upstream(const CandidateSet& set, const Batch& batch,
                                    bool differentiate_weights, UpstreamMatrix& up) {
    const int n_unl = batch.unlabeled_count();
    if (n_unl == 0) throw std::invalid_argument("unlabeled_term: no unlabeled examples in batch");
    const double inv = 1.0 / n_unl;
    const int dy = set.dy;

    double value = 0.0;
    std::vector<double> gen_per_class(dy);
    for (int i = 0; i < batch.n; ++i) {
        if (batch.labeled_mask[i]) continue;
        const ProbVector post = posterior_from_logits(set.logits(i));
        double row_value = 0.0;
        double mean_gen = 0.0;
        double mean_log_post = 0.0;
        for (int y = 0; y < dy; ++y) {
            gen_per_class[y] = set.lse_per_class[y] - set.logits(i)[y];
            const double log_post = std::log(post[y]);
            row_value += post[y] * (-log_post + gen_per_class[y]);
            mean_gen += post[y] * gen_per_class[y];
            mean_log_post += post[y] * log_post;
        }
        value += row_value;

        // Candidate-softmax part, posterior weights held constant.
        for (int y = 0; y < dy; ++y) {
            const double w = inv * post[y];
            for (int c = 0; c < set.count(); ++c) up.row(c)[y] += w * set.weight(c, y);
            up.row(i)[y] -= w;
        }
        if (differentiate_weights) {
            // Flow through the posterior: entropy part plus the reweighting
            // of the per-class generative terms.
            double* r = up.row(i);
            for (int k = 0; k < dy; ++k) {
                const double log_pk = std::log(post[k]);
                r[k] += inv * (post[k] * (mean_log_post - log_pk) +
                               post[k] * (gen_per_class[k] - mean_gen));
            }
        }
    }
    return value * inv;
}

}  // namespace

LossPart xent_loss(const EnergyNetwork& net, const Batch& batch) {
    batch.validate(net.output_dim());
    const int n_lab = batch.labeled_count();
    if (n_lab == 0) throw std::invalid_argument("xent_loss: no labeled examples");

    LossPart part;
    part.grad = net.zero_gradient();
    const double inv = 1.0 / n_lab;
    std::vector<double> upstream(net.output_dim());
    for (int i = 0; i < batch.n; ++i) {
        if (!batch.labeled_mask[i]) continue;
        ForwardTrace trace = net.forward_trace(batch.row(i));
        ProbVector p = posterior_from_logits(trace.logits());
        part.value += -std::log(p[batch.ys[i]]) * inv;
        for (int y = 0; y < net.output_dim(); ++y) upstream[y] = p[y];
        upstream[batch.ys[i]] -= 1.0;
        net.accumulate_grad_params(trace, upstream, inv, part.grad);
    }
    return part;
}

LossPart stjem_generative_term(const EnergyNetwork& net, const Batch& batch) {
    batch.validate(net.output_dim());
    CandidateSet set = build_candidates(net, batch, /*include_negatives=*/true);
    UpstreamMatrix up(set);
    LossPart part;
    part.value = generative_value_and_upstream(set, batch, up);
    part.grad = net.zero_gradient();
    materialize(net, set, up, part.grad);
    return part;
}

LossPart res_jem_term(const EnergyNetwork& net, const Batch& batch) {
    Batch stripped = batch;
    stripped.m = 0;
    stripped.negatives.clear();
    return stjem_generative_term(net, stripped);
}

LossPart unlabeled_term(const EnergyNetwork& net, const Batch& batch,
                        bool differentiate_posterior_weights) {
    batch.validate(net.output_dim());
    CandidateSet set = build_candidates(net, batch, /*include_negatives=*/true);
    UpstreamMatrix up(set);
    LossPart part;
    part.value = unlabeled_value_and_upstream(set, batch, differentiate_posterior_weights, up);
    part.grad = net.zero_gradient();
    materialize(net, set, up, part.grad);
    return part;
}

LossPart samples_xent_term(const EnergyNetwork& net, std::span<const double> samples, int dx,
                           std::span<const int> target_classes) {
    if (dx != net.input_dim()) throw std::invalid_argument("samples_xent_term: dx mismatch");
    const int m = static_cast<int>(target_classes.size());
    if (m < 1) throw std::invalid_argument("samples_xent_term: need at least one sample");
    if (samples.size() != static_cast<std::size_t>(m) * dx)
        throw std::invalid_argument("samples_xent_term: sample matrix size mismatch");
    for (int t : target_classes)
        if (t < 0 || t >= net.output_dim())
            throw std::invalid_argument("samples_xent_term: class index out of range");

    LossPart part;
    part.grad = net.zero_gradient();
    const double inv = 1.0 / m;
    std::vector<double> upstream(net.output_dim());
    for (int j = 0; j < m; ++j) {
        std::span<const double> x{samples.data() + static_cast<std::size_t>(j) * dx,
                                  static_cast<std::size_t>(dx)};
        ForwardTrace trace = net.forward_trace(x);
        ProbVector p = posterior_from_logits(trace.logits());
        part.value += -std::log(p[target_classes[j]]) * inv;
        for (int y = 0; y < net.output_dim(); ++y) upstream[y] = p[y];
        upstream[target_classes[j]] -= 1.0;
        net.accumulate_grad_params(trace, upstream, inv, part.grad);
    }
    return part;
}

std::pair<LossReport, ParamGradient> total_loss(const EnergyNetwork& net, const Batch& batch,
                                                const ObjectiveConfig& cfg,
                                                std::span<const int> negative_classes) {
    batch.validate(net.output_dim());
    if (cfg.use_unlabeled && batch.unlabeled_count() == 0)
        throw std::invalid_argument("total_loss: unlabeled toggle set but batch has no unlabeled rows");
    if (cfg.use_samples_xent && static_cast<int>(negative_classes.size()) != batch.m)
        throw std::invalid_argument("total_loss: samples_xent toggle needs a class per negative");

    LossReport report;
    report.candidate_count = batch.n + batch.m;
    ParamGradient grad = net.zero_gradient();

    {
        LossPart x = xent_loss(net, batch);
        report.xent = x.value;
        grad.axpy(cfg.xent_weight, x.grad);
    }

    const bool want_gen = cfg.use_gen && cfg.gen_weight != 0.0;
    const bool want_unl = cfg.use_unlabeled && cfg.unlabeled_weight != 0.0;
    if (want_gen || want_unl) {
        CandidateSet set = build_candidates(net, batch, /*include_negatives=*/true);
        UpstreamMatrix up(set);
        if (want_gen) {
            UpstreamMatrix gen_up(set);
            report.gen_term = generative_value_and_upstream(set, batch, gen_up);
            for (std::size_t i = 0; i < up.rows.size(); ++i)
                up.rows[i] += cfg.gen_weight * gen_up.rows[i];
        }
        if (want_unl) {
            UpstreamMatrix unl_up(set);
            report.unlabeled_term = unlabeled_value_and_upstream(
                set, batch, cfg.differentiate_posterior_weights, unl_up);
            for (std::size_t i = 0; i < up.rows.size(); ++i)
                up.rows[i] += cfg.unlabeled_weight * unl_up.rows[i];
        }
        materialize(net, set, up, grad);
    }

    if (cfg.use_samples_xent && cfg.samples_xent_weight != 0.0 && batch.m > 0) {
        LossPart s = samples_xent_term(net, batch.negatives, batch.dx, negative_classes);
        report.samples_xent_term = s.value;
        grad.axpy(cfg.samples_xent_weight, s.grad);
    }

    report.total = cfg.xent_weight * report.xent + cfg.gen_weight * report.gen_term +
                   cfg.unlabeled_weight * report.unlabeled_term +
                   cfg.samples_xent_weight * report.samples_xent_term;
    report.grad_norm = grad.norm();
    return {report, std::move(grad)};
}

MiDiagnostic mi_diagnostic(const std::vector<ProbVector>& posteriors) {
    if (posteriors.empty()) throw std::invalid_argument("mi_diagnostic: no posteriors");
    const std::size_t dy = posteriors.front().size();
    if (dy == 0) throw std::invalid_argument("mi_diagnostic: empty posterior");

    const double inv = 1.0 / static_cast<double>(posteriors.size());
    std::vector<double> marginal(dy, 0.0);
    double mean_log_post = 0.0;
    for (const ProbVector& p : posteriors) {
        if (p.size() != dy) throw std::invalid_argument("mi_diagnostic: ragged posteriors");
        for (std::size_t y = 0; y < dy; ++y) {
            marginal[y] += inv * p[y];
            if (p[y] > 0.0) mean_log_post += inv * p[y] * std::log(p[y]);
        }
    }
    double h_marginal = 0.0;
    for (double q : marginal)
        if (q > 0.0) h_marginal -= q * std::log(q);

    MiDiagnostic d;
    d.mean_log_posterior = mean_log_post;
    d.marginal_entropy = h_marginal;
    d.mi = mean_log_post + h_marginal;
    return d;
}

}  // namespace stjem
