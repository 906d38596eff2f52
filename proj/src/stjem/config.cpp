// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stjem/errors.hpp"

namespace stjem {

namespace {

using Type = RunConfig::KeySpec::Type;

std::vector<RunConfig::KeySpec> build_registry() {
    return {
        {"seed", Type::Int, "0", {}, "master PRNG seed for the whole run"},
        {"threads", Type::Int, "1", {}, "worker threads for parallel SGLD chains"},
        {"hidden_dims", Type::String, "32,32", {}, "comma-separated hidden layer widths"},
        {"activation", Type::Enum, "smooth-swish", {"smooth-swish", "tanh", "leaky-relu"},
         "hidden activation"},
        {"batch_size", Type::Int, "64", {}, "examples per training batch"},
        {"epochs", Type::Int, "20", {}, "passes over the labeled data"},
        {"sgld_samples", Type::Int, "8", {}, "SGLD negatives per batch (0 = RES-JEM)"},
        {"optimizer", Type::Enum, "adam", {"adam", "sgd"}, "parameter update rule"},
        {"lr", Type::Real, "1e-3", {}, "learning rate"},
        {"momentum", Type::Real, "0.9", {}, "sgd momentum"},
        {"adam_beta1", Type::Real, "0.9", {}, "adam first-moment decay"},
        {"adam_beta2", Type::Real, "0.999", {}, "adam second-moment decay"},
        {"adam_eps", Type::Real, "1e-8", {}, "adam denominator epsilon"},
        {"lr_decay_factor", Type::Real, "1.0", {}, "multiply lr by this every decay interval"},
        {"lr_decay_every_epochs", Type::Int, "0", {}, "decay interval in epochs (0 = constant)"},
        {"xent_weight", Type::Real, "1.0", {}, "weight of the cross-entropy term"},
        {"gen_weight", Type::Real, "1.0", {}, "weight of the generative term"},
        {"unlabeled_weight", Type::Real, "0.5", {}, "weight of the unlabeled term"},
        {"samples_xent_weight", Type::Real, "0.0", {}, "weight of the samples cross-entropy term"},
        {"use_gen", Type::Bool, "true", {}, "enable the generative term"},
        {"use_unlabeled", Type::Bool, "false", {}, "enable the unlabeled term"},
        {"use_samples_xent", Type::Bool, "false",
         {}, "enable cross-entropy on conditionally generated samples"},
        {"differentiate_posterior_weights", Type::Bool, "false",
         {}, "differentiate through the unlabeled term's posterior weights"},
        {"sgld_step_size", Type::Real, "1.0", {}, "SGLD step size alpha"},
        {"sgld_noise", Type::Real, "0.01", {}, "SGLD noise scale sigma (decoupled from alpha)"},
        {"sgld_steps", Type::Int, "20", {}, "SGLD steps per chain"},
        {"sgld_target", Type::Enum, "marginal", {"marginal", "conditional"},
         "negatives from the marginal or from per-class heads"},
        {"sgld_schedule", Type::Enum, "fixed", {"fixed", "linear"}, "SGLD step-count schedule"},
        {"sgld_schedule_fraction", Type::Real, "0.1",
         {}, "linear schedule: +1 step every this fraction of an epoch"},
        {"sgld_schedule_max_steps", Type::Int, "0", {}, "linear schedule cap (0 = none)"},
        {"sgld_stride", Type::Int, "1", {}, "regenerate negatives every n batches"},
        {"buffer_capacity", Type::Int, "10000", {}, "replay buffer capacity"},
        {"buffer_reinit_prob", Type::Real, "0.05", {}, "fresh-start probability per chain"},
        {"divergence_threshold", Type::Real, "50.0",
         {}, "generative-term value that trips the divergence tripwire"},
        {"eval_every", Type::Int, "0", {}, "steps between eval/checkpoints (0 = each epoch)"},
        {"labeled_unlabeled_ratio", Type::Real, "0.0",
         {}, "unlabeled examples per labeled example in each batch"},
        {"dequantize", Type::Bool, "false",
         {}, "add one quantization step of uniform noise to integer-valued inputs"},
    };
}

const std::vector<RunConfig::KeySpec>& registry_ref() {
    static const std::vector<RunConfig::KeySpec> reg = build_registry();
    return reg;
}

const RunConfig::KeySpec* find_spec(const std::string& key) {
    for (const auto& spec : registry_ref())
        if (spec.name == key) return &spec;
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

void check_value(const RunConfig::KeySpec& spec, const std::string& value) {
    switch (spec.type) {
        case Type::Int: {
            std::size_t used = 0;
            try {
                (void)std::stoll(value, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("config: key '" + spec.name + "' wants an integer, got '" + value + "'");
            }
            if (used != value.size())
                throw std::invalid_argument("config: key '" + spec.name + "' wants an integer, got '" + value + "'");
            return;
        }
        case Type::Real: {
            std::size_t used = 0;
            try {
                (void)std::stod(value, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("config: key '" + spec.name + "' wants a real, got '" + value + "'");
            }
            if (used != value.size())
                throw std::invalid_argument("config: key '" + spec.name + "' wants a real, got '" + value + "'");
            return;
        }
        case Type::Bool:
            if (value != "true" && value != "false")
                throw std::invalid_argument("config: key '" + spec.name + "' wants true/false, got '" + value + "'");
            return;
        case Type::String:
            return;
        case Type::Enum:
            if (std::find(spec.enum_values.begin(), spec.enum_values.end(), value) ==
                spec.enum_values.end())
                throw std::invalid_argument("config: key '" + spec.name + "' got unknown value '" + value + "'");
            return;
    }
}

}  // namespace

RunConfig::RunConfig() {
    for (const auto& spec : registry_ref()) values_[spec.name] = spec.default_value;
}

const std::vector<RunConfig::KeySpec>& RunConfig::registry() { return registry_ref(); }

RunConfig RunConfig::load(std::istream& is, const std::string& origin) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw format_error("config " + origin + ": expected key = value", line_no);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        try {
            cfg.set(key, value);
        } catch (const std::invalid_argument& e) {
            throw format_error(std::string(e.what()) + " in " + origin, line_no);
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open: " + path);
    return load(is, path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const KeySpec* spec = find_spec(key);
    if (!spec) throw std::invalid_argument("config: unknown key '" + key + "'");
    check_value(*spec, value);
    values_[key] = value;
}

bool RunConfig::has_key(const std::string& key) const { return find_spec(key) != nullptr; }

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    return it->second;
}

std::int64_t RunConfig::get_int(const std::string& key) const { return std::stoll(get(key)); }
double RunConfig::get_real(const std::string& key) const { return std::stod(get(key)); }
bool RunConfig::get_bool(const std::string& key) const { return get(key) == "true"; }

void RunConfig::apply_env_overrides() {
    if (const char* seed = std::getenv("STJEM_SEED")) set("seed", seed);
    if (const char* threads = std::getenv("STJEM_THREADS")) set("threads", threads);
}

void RunConfig::dump(std::ostream& os) const {
    for (const auto& spec : registry_ref()) {
        os << "# " << spec.doc << "\n";
        os << spec.name << " = " << values_.at(spec.name) << "\n";
    }
}

}  // namespace stjem
