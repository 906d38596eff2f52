// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stjem {

// Affine per-dimension map between raw and model coordinates:
// normalized = (raw - shift) / scale. Generators record the map they used so
// model-space results can be taken back to raw units.
struct Normalization {
    std::vector<double> shift;
    std::vector<double> scale;

    static Normalization identity(int dims);
    std::vector<double> normalize(std::span<const double> raw) const;
    std::vector<double> denormalize(std::span<const double> normalized) const;
};

struct Dataset {
    std::string name;
    int n = 0;
    int dx = 0;
    int dy = 0;                      // class count
    std::vector<double> xs;          // n * dx, model coordinates in [-1, 1]
    std::vector<int> ys;             // n
    std::vector<bool> labeled_mask;  // n
    Normalization norm;

    std::span<const double> row(int i) const {
        return {xs.data() + static_cast<std::size_t>(i) * dx, static_cast<std::size_t>(dx)};
    }
    int labeled_count() const;
    void validate() const;

    // First n_head rows and the rest, sharing name/norm/dy.
    std::pair<Dataset, Dataset> split(int n_head) const;
};

// Two interleaved half-circles, labels 0/1. Points are evenly spaced along
// each arc with Gaussian jitter, then mapped into the model box by a fixed
// affine (recorded in the normalization).
Dataset make_two_moons(int n, double noise_sd, std::uint64_t seed);

// Isotropic Gaussian blobs at the given means (model coordinates), labels =
// mode index, points assigned round-robin.
Dataset make_gmm(int n, int k_modes, const std::vector<std::vector<double>>& means,
                 double cov_scale, std::uint64_t seed);

// Single-class circle of the given radius with radial Gaussian noise.
Dataset make_ring(int n, double radius, double noise_sd, std::uint64_t seed);

// CSV with an optional metadata header; see dump_csv for the exact layout.
// Column schema is taken from the header row: feature columns x0..x{k},
// a `label` column, and an optional `labeled` flag column (default: all
// labeled). Malformed rows report their line number.
Dataset load_csv(const std::string& path);
Dataset load_csv(std::istream& is, const std::string& origin);

// Layout: `# stjem-dataset v1` / `# name: ...` / `# classes: K` /
// `# norm: shift0 scale0 ...`, then a header row and one row per example,
// values with 17 significant digits so load(dump(d)) == d.
void dump_csv(const Dataset& d, const std::string& path);
void dump_csv(const Dataset& d, std::ostream& os);

// Keeps exactly keep_n rows labeled, as class-balanced as possible,
// deterministic under seed. keep_n < class count cannot stratify and is
// reported in `warning` rather than failed.
struct MaskResult {
    Dataset dataset;
    std::string warning;
};
MaskResult mask_labels(const Dataset& d, int keep_n, std::uint64_t seed);

// Binary P6 scatter plot of 2-D points over the SGLD clamp box; class
// labels pick the dot color (label -1 = gray). Rejects dx != 2.
void write_scatter_ppm(const std::string& path, std::span<const double> xs, int n, int dx,
                       std::span<const int> labels, int image_size = 256);

// A dataset CSV path, or a generator spec of the form
//   two-moons:n=500,noise_sd=0.1,seed=7
//   gmm:n=1000,k=4,dx=2,cov_scale=0.08,seed=1[,means=ax|ay;bx|by;...]
//   ring:n=400,radius=0.7,noise_sd=0.05,seed=3
// gmm means default to k points evenly spread on a radius-0.6 circle (2-D)
// or evenly spaced in [-0.6, 0.6] (1-D).
Dataset dataset_from_spec(const std::string& spec);

}  // namespace stjem
