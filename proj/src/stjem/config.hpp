// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace stjem {

// Flat `key = value` run configuration with `#` comments. Every key has a
// registered type and default; unknown keys and ill-typed values are
// rejected at parse time. Precedence is handled by the caller: later set()
// calls win, so apply config file, then environment, then CLI flags.
class RunConfig {
public:
    struct KeySpec {
        enum class Type { Int, Real, Bool, String, Enum };
        std::string name;
        Type type;
        std::string default_value;
        std::vector<std::string> enum_values;  // for Type::Enum
        std::string doc;
    };

    RunConfig();  // all defaults

    static RunConfig load(const std::string& path);
    static RunConfig load(std::istream& is, const std::string& origin);

    // Throws std::invalid_argument on unknown key or ill-typed value.
    void set(const std::string& key, const std::string& value);
    bool has_key(const std::string& key) const;

    const std::string& get(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_real(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    // Applies STJEM_SEED / STJEM_THREADS when present in the environment.
    void apply_env_overrides();

    void dump(std::ostream& os) const;  // every key, current value, doc
    static const std::vector<KeySpec>& registry();

private:
    std::map<std::string, std::string> values_;
};

}  // namespace stjem
