// SPDX-License-Identifier: Apache-2.0
//
// sirp-doa: direction finding for MIMO radar in compound-Gaussian clutter
// Copyright (C) 2026 The sirp-doa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include "sirp/harness.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace sirp {

/// Malformed or invalid experiment file. `where` is a JSON pointer to the
/// offending field, or "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string where, const std::string& message)
        : std::runtime_error(where.empty() ? message : where + ": " + message),
          where_(std::move(where)), message_(message) {}

    const std::string& where() const noexcept { return where_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string where_;
    std::string message_;
};

/// Parses an experiment description. Absent keys keep the two-target
/// defaults for the chosen clutter family; unknown keys are rejected.
/// Angles are in degrees.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a file. A missing file raises ConfigError naming it.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Serializes back to the same format (round-trips through parse_config).
std::string dump_config(const ExperimentConfig& config);

} // namespace sirp
