// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stjem {

double logsumexp(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("logsumexp: empty input");
    double m = values[0];
    for (double v : values) {
        if (std::isnan(v)) throw std::invalid_argument("logsumexp: NaN input");
        m = std::max(m, v);
    }
    if (std::isinf(m)) return m;  // all -inf or some +inf
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

ProbVector softmax(std::span<const double> z) {
    double lse = logsumexp(z);
    ProbVector p(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::exp(z[i] - lse);
    return p;
}

ProbVector posterior_from_logits(std::span<const double> q) { return softmax(q); }

int argmax(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("argmax: empty input");
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

double ece(std::span<const double> confidences, const std::vector<bool>& correct, int n_bins) {
    if (n_bins <= 0) throw std::invalid_argument("ece: n_bins must be positive");
    if (confidences.size() != correct.size())
        throw std::invalid_argument("ece: confidence/correct length mismatch");
    const std::size_t n = confidences.size();
    if (n == 0) return 0.0;

    std::vector<double> conf_sum(n_bins, 0.0), acc_sum(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double c = confidences[i];
        if (!(c >= 0.0 && c <= 1.0))
            throw std::invalid_argument("ece: confidence outside [0, 1]");
        int b = std::min(static_cast<int>(c * n_bins), n_bins - 1);  // 1.0 joins the top bin
        conf_sum[b] += c;
        acc_sum[b] += correct[i] ? 1.0 : 0.0;
        ++count[b];
    }
    double e = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        if (count[b] == 0) continue;
        double frac = static_cast<double>(count[b]) / static_cast<double>(n);
        e += frac * std::abs(acc_sum[b] / count[b] - conf_sum[b] / count[b]);
    }
    return e;
}

}  // namespace stjem
