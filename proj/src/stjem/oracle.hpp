// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stjem/energy_net.hpp"
#include "stjem/rng.hpp"

namespace stjem {

// Brute-force ground truth on discretized low-dimensional domains. Exists to
// verify, not to scale: enumeration is guarded at 3 dims / 1e6 points.

class GridDomain {
public:
    struct Axis {
        double lo;
        double hi;
        int n_points;
    };

    explicit GridDomain(std::vector<Axis> axes);

    int dims() const { return static_cast<int>(axes_.size()); }
    std::size_t total_points() const { return total_; }
    double cell_volume() const { return cell_volume_; }
    const std::vector<Axis>& axes() const { return axes_; }

    // Midpoint-rule cell center of the flat-indexed cell.
    std::vector<double> point(std::size_t flat_index) const;

private:
    std::vector<Axis> axes_;
    std::size_t total_ = 0;
    double cell_volume_ = 0.0;
};

struct PartitionEstimate {
    std::vector<double> log_z_per_class;  // log integral of exp(f(x)_y) dx, per class
    double log_z_total;                   // logsumexp over classes
};

// Riemann-sum partition function: log Z_y = logsumexp_k f(x_k)_y + log(cell volume).
PartitionEstimate grid_partition(const EnergyNetwork& net, const GridDomain& grid);

// Exact gradient of log p(x | y) with respect to the parameters:
// grad f(x)_y minus the expectation of grad f(.)_y under the grid-enumerated
// p(x | y).
ParamGradient exact_grad_log_px_given_y(const EnergyNetwork& net, std::span<const double> x,
                                        int y, const GridDomain& grid);

// The self-normalized importance-sampling gradient estimate for the same
// quantity: candidates are {positive} plus `others`, weighted by the softmax
// of f(.)_y over that set.
ParamGradient self_normalized_grad_estimate(const EnergyNetwork& net,
                                            std::span<const double> positive, int y,
                                            const std::vector<std::vector<double>>& others);

// Mutual information of an explicit joint table, joint[y][k] over classes
// and grid cells. Entries must be non-negative and sum to 1 within 1e-9.
// 0 log 0 counts as 0.
double exact_mi(const std::vector<std::vector<double>>& joint);

// Per-cell masses p(x_k, y) * cell_volume; the table sums to 1.
std::vector<std::vector<double>> normalized_model_density(const EnergyNetwork& net,
                                                          const GridDomain& grid);

// Exact conditional draws from p(x | y) by inverse CDF over enumerated cell
// masses. Returns cell centers.
std::vector<std::vector<double>> sample_exact(const EnergyNetwork& net, const GridDomain& grid,
                                              int y, int n, Rng& rng);

double cosine_similarity(const ParamGradient& a, const ParamGradient& b);

// The oracle-vs-estimator suite behind the oracle-check CLI subcommand:
// partition consistency, grid-refinement convergence, exact gradient vs
// finite differences, estimator convergence to the exact gradient, density
// normalization, the two MI formulas, and stationarity of both gradient
// routes at a flat-energy optimum.
struct OracleCheckItem {
    std::string name;
    bool pass;
    std::string detail;
};

struct OracleCheckReport {
    std::vector<OracleCheckItem> items;
    bool all_pass() const;
};

OracleCheckReport oracle_check(int grid_points, std::uint64_t seed);

}  // namespace stjem
