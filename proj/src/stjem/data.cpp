// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "stjem/errors.hpp"
#include "stjem/rng.hpp"
#include "stjem/sgld.hpp"

namespace stjem {

namespace {

double clamp_box(double v) { return std::clamp(v, kDataBoxLo, kDataBoxHi); }

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

Normalization Normalization::identity(int dims) {
    Normalization n;
    n.shift.assign(dims, 0.0);
    n.scale.assign(dims, 1.0);
    return n;
}

std::vector<double> Normalization::normalize(std::span<const double> raw) const {
    if (raw.size() != shift.size()) throw std::invalid_argument("normalize: dimension mismatch");
    std::vector<double> out(raw.size());
    for (std::size_t d = 0; d < raw.size(); ++d) out[d] = (raw[d] - shift[d]) / scale[d];
    return out;
}

std::vector<double> Normalization::denormalize(std::span<const double> normalized) const {
    if (normalized.size() != shift.size())
        throw std::invalid_argument("denormalize: dimension mismatch");
    std::vector<double> out(normalized.size());
    for (std::size_t d = 0; d < normalized.size(); ++d)
        out[d] = normalized[d] * scale[d] + shift[d];
    return out;
}

int Dataset::labeled_count() const {
    int c = 0;
    for (bool b : labeled_mask) c += b ? 1 : 0;
    return c;
}

void Dataset::validate() const {
    if (n < 1 || dx < 1 || dy < 1) throw std::invalid_argument("Dataset: empty");
    if (xs.size() != static_cast<std::size_t>(n) * dx || ys.size() != static_cast<std::size_t>(n) ||
        labeled_mask.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("Dataset: inconsistent sizes");
    if (static_cast<int>(norm.shift.size()) != dx || static_cast<int>(norm.scale.size()) != dx)
        throw std::invalid_argument("Dataset: normalization record dimension mismatch");
    for (double v : xs)
        if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite feature");
    for (int i = 0; i < n; ++i)
        if (ys[i] < 0 || ys[i] >= dy) throw std::invalid_argument("Dataset: label out of range");
}

std::pair<Dataset, Dataset> Dataset::split(int n_head) const {
    if (n_head < 1 || n_head >= n) throw std::invalid_argument("Dataset::split: bad head size");
    Dataset head = *this, tail = *this;
    head.n = n_head;
    head.xs.assign(xs.begin(), xs.begin() + static_cast<std::size_t>(n_head) * dx);
    head.ys.assign(ys.begin(), ys.begin() + n_head);
    head.labeled_mask.assign(labeled_mask.begin(), labeled_mask.begin() + n_head);
    tail.n = n - n_head;
    tail.xs.assign(xs.begin() + static_cast<std::size_t>(n_head) * dx, xs.end());
    tail.ys.assign(ys.begin() + n_head, ys.end());
    tail.labeled_mask.assign(labeled_mask.begin() + n_head, labeled_mask.end());
    return {std::move(head), std::move(tail)};
}

Dataset make_two_moons(int n, double noise_sd, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_two_moons: n must be positive");
    if (noise_sd < 0.0) throw std::invalid_argument("make_two_moons: negative noise");

    Dataset d;
    d.name = "two-moons";
    d.n = n;
    d.dx = 2;
    d.dy = 2;
    d.norm.shift = {0.5, 0.25};
    d.norm.scale = {1.75, 1.0};

    Rng rng(seed);
    const int n_outer = n / 2 + (n % 2);
    for (int i = 0; i < n; ++i) {
        const bool outer = i < n_outer;
        const int arc_n = outer ? n_outer : n - n_outer;
        const int arc_i = outer ? i : i - n_outer;
        const double t = std::numbers::pi * (arc_n > 1 ? static_cast<double>(arc_i) / (arc_n - 1) : 0.5);
        double raw[2];
        if (outer) {
            raw[0] = std::cos(t);
            raw[1] = std::sin(t);
        } else {
            raw[0] = 1.0 - std::cos(t);
            raw[1] = 0.5 - std::sin(t);
        }
        raw[0] += noise_sd * rng.normal();
        raw[1] += noise_sd * rng.normal();
        std::vector<double> z = d.norm.normalize(std::span<const double>(raw, 2));
        d.xs.push_back(clamp_box(z[0]));
        d.xs.push_back(clamp_box(z[1]));
        d.ys.push_back(outer ? 0 : 1);
        d.labeled_mask.push_back(true);
    }
    return d;
}

Dataset make_gmm(int n, int k_modes, const std::vector<std::vector<double>>& means,
                 double cov_scale, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_gmm: n must be positive");
    if (k_modes < 1 || static_cast<int>(means.size()) != k_modes)
        throw std::invalid_argument("make_gmm: need one mean per mode");
    if (cov_scale < 0.0) throw std::invalid_argument("make_gmm: negative cov_scale");
    const int dx = static_cast<int>(means.front().size());
    if (dx < 1) throw std::invalid_argument("make_gmm: empty mean vector");
    for (const auto& m : means)
        if (static_cast<int>(m.size()) != dx)
            throw std::invalid_argument("make_gmm: ragged mean vectors");

    Dataset d;
    d.name = "gmm";
    d.n = n;
    d.dx = dx;
    d.dy = k_modes;
    d.norm = Normalization::identity(dx);

    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const int mode = i % k_modes;
        for (int j = 0; j < dx; ++j)
            d.xs.push_back(clamp_box(means[mode][j] + cov_scale * rng.normal()));
        d.ys.push_back(mode);
        d.labeled_mask.push_back(true);
    }
    return d;
}

Dataset make_ring(int n, double radius, double noise_sd, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_ring: n must be positive");
    if (radius <= 0.0 || radius > 1.0) throw std::invalid_argument("make_ring: radius outside (0, 1]");
    if (noise_sd < 0.0) throw std::invalid_argument("make_ring: negative noise");

    Dataset d;
    d.name = "ring";
    d.n = n;
    d.dx = 2;
    d.dy = 1;
    d.norm = Normalization::identity(2);

    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n;
        const double r = radius + noise_sd * rng.normal();
        d.xs.push_back(clamp_box(r * std::cos(theta)));
        d.xs.push_back(clamp_box(r * std::sin(theta)));
        d.ys.push_back(0);
        d.labeled_mask.push_back(true);
    }
    return d;
}

void dump_csv(const Dataset& d, std::ostream& os) {
    os << "# stjem-dataset v1\n";
    os << "# name: " << d.name << "\n";
    os << "# classes: " << d.dy << "\n";
    os << "# norm:";
    for (int j = 0; j < d.dx; ++j) os << " " << num17(d.norm.shift[j]) << " " << num17(d.norm.scale[j]);
    os << "\n";
    for (int j = 0; j < d.dx; ++j) os << "x" << j << ",";
    os << "label,labeled\n";
    for (int i = 0; i < d.n; ++i) {
        for (int j = 0; j < d.dx; ++j) os << num17(d.xs[static_cast<std::size_t>(i) * d.dx + j]) << ",";
        os << d.ys[i] << "," << (d.labeled_mask[i] ? 1 : 0) << "\n";
    }
}

void dump_csv(const Dataset& d, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    dump_csv(d, os);
    if (!os) throw io_error("write failed: " + path);
}

Dataset load_csv(std::istream& is, const std::string& origin) {
    Dataset d;
    d.name = origin;
    int declared_classes = -1;
    bool have_norm = false;

    std::string line;
    std::size_t line_no = 0;
    // metadata + header
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (t.rfind("# name:", 0) == 0) d.name = trim(t.substr(7));
            if (t.rfind("# classes:", 0) == 0) {
                try {
                    declared_classes = std::stoi(trim(t.substr(10)));
                } catch (const std::exception&) {
                    throw format_error("dataset csv: bad classes header", line_no);
                }
            }
            if (t.rfind("# norm:", 0) == 0) {
                std::stringstream ss(t.substr(7));
                double v;
                std::vector<double> vals;
                while (ss >> v) vals.push_back(v);
                if (vals.empty() || vals.size() % 2 != 0)
                    throw format_error("dataset csv: bad norm header", line_no);
                d.norm.shift.clear();
                d.norm.scale.clear();
                for (std::size_t k = 0; k < vals.size(); k += 2) {
                    d.norm.shift.push_back(vals[k]);
                    d.norm.scale.push_back(vals[k + 1]);
                }
                have_norm = true;
            }
            continue;
        }
        header = split_commas(t);
        break;
    }
    if (header.empty()) throw format_error("dataset csv: missing header row", line_no);

    int label_col = -1, labeled_col = -1;
    std::vector<int> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") label_col = static_cast<int>(c);
        else if (header[c] == "labeled") labeled_col = static_cast<int>(c);
        else if (!header[c].empty() && header[c][0] == 'x') feature_cols.push_back(static_cast<int>(c));
        else throw format_error("dataset csv: unknown column '" + header[c] + "'", line_no);
    }
    if (feature_cols.empty()) throw format_error("dataset csv: no feature columns", line_no);
    if (label_col < 0) throw format_error("dataset csv: missing label column", line_no);

    d.dx = static_cast<int>(feature_cols.size());
    if (!have_norm) d.norm = Normalization::identity(d.dx);
    if (static_cast<int>(d.norm.shift.size()) != d.dx)
        throw format_error("dataset csv: norm header dimension mismatch", line_no);

    int max_label = -1;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> fields = split_commas(t);
        if (fields.size() != header.size())
            throw format_error("dataset csv: wrong field count", line_no);
        try {
            for (int c : feature_cols) {
                std::size_t used = 0;
                double v = std::stod(fields[c], &used);
                if (used != fields[c].size() || !std::isfinite(v)) throw std::invalid_argument("");
                d.xs.push_back(v);
            }
            std::size_t used = 0;
            int y = std::stoi(fields[label_col], &used);
            if (used != fields[label_col].size() || y < 0) throw std::invalid_argument("");
            d.ys.push_back(y);
            max_label = std::max(max_label, y);
            bool lab = true;
            if (labeled_col >= 0) {
                if (fields[labeled_col] == "0") lab = false;
                else if (fields[labeled_col] == "1") lab = true;
                else throw std::invalid_argument("");
            }
            d.labeled_mask.push_back(lab);
        } catch (const std::invalid_argument&) {
            throw format_error("dataset csv: malformed row", line_no);
        } catch (const std::out_of_range&) {
            throw format_error("dataset csv: value out of range", line_no);
        }
        ++d.n;
    }
    if (d.n == 0) throw format_error("dataset csv: no data rows", line_no);

    d.dy = declared_classes > 0 ? declared_classes : max_label + 1;
    if (max_label >= d.dy)
        throw format_error("dataset csv: label exceeds declared class count", line_no);
    d.validate();
    return d;
}

Dataset load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open: " + path);
    return load_csv(is, path);
}

MaskResult mask_labels(const Dataset& d, int keep_n, std::uint64_t seed) {
    if (keep_n < 0 || keep_n > d.n)
        throw std::invalid_argument("mask_labels: keep_n outside [0, n]");

    std::vector<std::vector<int>> by_class(d.dy);
    for (int i = 0; i < d.n; ++i) by_class[d.ys[i]].push_back(i);

    Rng rng(seed);
    for (auto& idx : by_class)  // Fisher-Yates per class
        for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
            std::swap(idx[i], idx[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);

    // Even quotas, remainders and class-size shortfalls spilled in class order.
    std::vector<int> quota(d.dy, 0);
    int assigned = 0;
    for (int c = 0; c < d.dy; ++c) {
        quota[c] = std::min<int>(keep_n / d.dy, static_cast<int>(by_class[c].size()));
        assigned += quota[c];
    }
    int leftover = keep_n - assigned;
    for (int c = 0; c < d.dy && leftover > 0; ++c) {
        int room = static_cast<int>(by_class[c].size()) - quota[c];
        int take = std::min(room, leftover);
        quota[c] += take;
        leftover -= take;
    }

    MaskResult result;
    result.dataset = d;
    std::fill(result.dataset.labeled_mask.begin(), result.dataset.labeled_mask.end(), false);
    for (int c = 0; c < d.dy; ++c)
        for (int k = 0; k < quota[c]; ++k) result.dataset.labeled_mask[by_class[c][k]] = true;

    if (keep_n > 0 && keep_n < d.dy)
        result.warning = "keep_n below class count; some classes have no labeled examples";
    return result;
}

namespace {

std::map<std::string, std::string> parse_kv_params(const std::string& s) {
    std::map<std::string, std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("dataset spec: expected key=value, got '" + item + "'");
        out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
    return out;
}

double param_real(const std::map<std::string, std::string>& kv, const std::string& key,
                  double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

std::int64_t param_int(const std::map<std::string, std::string>& kv, const std::string& key,
                       std::int64_t fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoll(it->second);
}

void reject_unknown(const std::map<std::string, std::string>& kv,
                    std::initializer_list<const char*> known) {
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw std::invalid_argument("dataset spec: unknown parameter '" + k + "'");
    }
}

}  // namespace

Dataset dataset_from_spec(const std::string& spec) {
    const std::size_t colon = spec.find(':');
    const std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    if (kind != "two-moons" && kind != "gmm" && kind != "ring") return load_csv(spec);
    auto kv = parse_kv_params(colon == std::string::npos ? "" : spec.substr(colon + 1));

    if (kind == "two-moons") {
        reject_unknown(kv, {"n", "noise_sd", "seed"});
        return make_two_moons(static_cast<int>(param_int(kv, "n", 500)),
                              param_real(kv, "noise_sd", 0.1),
                              static_cast<std::uint64_t>(param_int(kv, "seed", 0)));
    }
    if (kind == "ring") {
        reject_unknown(kv, {"n", "radius", "noise_sd", "seed"});
        return make_ring(static_cast<int>(param_int(kv, "n", 400)), param_real(kv, "radius", 0.7),
                         param_real(kv, "noise_sd", 0.05),
                         static_cast<std::uint64_t>(param_int(kv, "seed", 0)));
    }

    reject_unknown(kv, {"n", "k", "dx", "cov_scale", "seed", "means"});
    const int k = static_cast<int>(param_int(kv, "k", 2));
    const int dx = static_cast<int>(param_int(kv, "dx", 2));
    std::vector<std::vector<double>> means;
    if (auto it = kv.find("means"); it != kv.end()) {
        std::stringstream modes(it->second);
        std::string mode;
        while (std::getline(modes, mode, ';')) {
            std::vector<double> m;
            std::stringstream comps(mode);
            std::string comp;
            while (std::getline(comps, comp, '|')) m.push_back(std::stod(comp));
            means.push_back(std::move(m));
        }
    } else if (dx == 2) {
        for (int i = 0; i < k; ++i) {
            const double a = 2.0 * std::numbers::pi * i / k;
            means.push_back({0.6 * std::cos(a), 0.6 * std::sin(a)});
        }
    } else if (dx == 1) {
        for (int i = 0; i < k; ++i)
            means.push_back({k > 1 ? -0.6 + 1.2 * i / (k - 1) : 0.0});
    } else {
        throw std::invalid_argument("dataset spec: gmm with dx > 2 needs explicit means");
    }
    return make_gmm(static_cast<int>(param_int(kv, "n", 1000)), k, means,
                    param_real(kv, "cov_scale", 0.1),
                    static_cast<std::uint64_t>(param_int(kv, "seed", 0)));
}

void write_scatter_ppm(const std::string& path, std::span<const double> xs, int n, int dx,
                       std::span<const int> labels, int image_size) {
    if (dx != 2) throw std::invalid_argument("write_scatter_ppm: only 2-D data");
    if (n < 0 || xs.size() != static_cast<std::size_t>(n) * 2)
        throw std::invalid_argument("write_scatter_ppm: size mismatch");
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("write_scatter_ppm: label count mismatch");
    if (image_size < 16) throw std::invalid_argument("write_scatter_ppm: image too small");

    static const unsigned char palette[8][3] = {
        {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40},
        {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {23, 190, 207}};

    std::vector<unsigned char> img(static_cast<std::size_t>(image_size) * image_size * 3, 255);
    auto plot = [&](double x, double y, const unsigned char* rgb) {
        // map the SGLD clamp box onto the image, y axis up
        int px = static_cast<int>((x - kSgldClampLo) / (kSgldClampHi - kSgldClampLo) * (image_size - 1));
        int py = static_cast<int>((kSgldClampHi - y) / (kSgldClampHi - kSgldClampLo) * (image_size - 1));
        for (int dy_px = -1; dy_px <= 1; ++dy_px)
            for (int dx_px = -1; dx_px <= 1; ++dx_px) {
                int qx = px + dx_px, qy = py + dy_px;
                if (qx < 0 || qy < 0 || qx >= image_size || qy >= image_size) continue;
                std::size_t at = (static_cast<std::size_t>(qy) * image_size + qx) * 3;
                img[at] = rgb[0];
                img[at + 1] = rgb[1];
                img[at + 2] = rgb[2];
            }
    };

    static const unsigned char gray[3] = {128, 128, 128};
    for (int i = 0; i < n; ++i) {
        const unsigned char* rgb = gray;
        if (!labels.empty() && labels[i] >= 0) rgb = palette[labels[i] % 8];
        plot(xs[static_cast<std::size_t>(i) * 2], xs[static_cast<std::size_t>(i) * 2 + 1], rgb);
    }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << "P6\n" << image_size << " " << image_size << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
    if (!os) throw io_error("write failed: " + path);
}

}  // namespace stjem
