// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stjem {

// Malformed or truncated binary/text input. `offset` is the byte offset
// (binary formats) or line number (text formats) where parsing stopped.
class format_error : public std::runtime_error {
public:
    format_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// SGLD produced a non-finite gradient or iterate.
class sampler_divergence : public std::runtime_error {
public:
    sampler_divergence(const std::string& what, int step)
        : std::runtime_error(what + " (sgld step " + std::to_string(step) + ")"),
          step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

// Requested enumeration exceeds the configured guard limits.
class resource_limit : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training aborted after exhausting its rollback budget.
class training_failed : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stjem
