// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "stjem/energy_net.hpp"

namespace stjem::testsupport {

// Central finite differences of a scalar loss with respect to every network
// parameter. The loss callback sees the mutated network.
inline ParamGradient fd_param_gradient(EnergyNetwork& net,
                                       const std::function<double()>& loss_fn,
                                       double eps = 1e-5) {
    ParamGradient fd = net.zero_gradient();
    std::span<double> params = net.mutable_params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + eps;
        const double hi = loss_fn();
        params[i] = saved - eps;
        const double lo = loss_fn();
        params[i] = saved;
        fd.values[i] = (hi - lo) / (2.0 * eps);
    }
    return fd;
}

inline std::vector<double> fd_input_gradient(
    const std::function<double(std::span<const double>)>& f, std::span<const double> x,
    double eps = 1e-5) {
    std::vector<double> work(x.begin(), x.end());
    std::vector<double> fd(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = work[i];
        work[i] = saved + eps;
        const double hi = f(work);
        work[i] = saved - eps;
        const double lo = f(work);
        work[i] = saved;
        fd[i] = (hi - lo) / (2.0 * eps);
    }
    return fd;
}

// Worst per-coordinate relative mismatch. Coordinates tiny compared to the
// gradient's scale are measured against that scale, so exact zeros do not
// blow the ratio up on finite-difference noise.
inline double max_rel_mismatch(std::span<const double> got, std::span<const double> want) {
    double scale = 1e-12;
    for (double w : want) scale = std::max(scale, std::abs(w));
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = std::abs(got[i] - want[i]);
        const double denom =
            std::max({std::abs(got[i]), std::abs(want[i]), 1e-4 * scale, 1e-12});
        worst = std::max(worst, d / denom);
    }
    return worst;
}

inline double max_rel_mismatch(const ParamGradient& got, const ParamGradient& want) {
    return max_rel_mismatch(std::span<const double>(got.values),
                            std::span<const double>(want.values));
}

}  // namespace stjem::testsupport
