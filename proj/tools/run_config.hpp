// Copyright 2026 The roughslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "roughslab/common.hpp"

namespace roughslab::cli {

/// Bad config: unknown key, wrong type, out-of-range value. Exit code 2.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Typed, strict view of one JSON object. Every key must be consumed, or
/// `finish` raises naming the first stray one.
class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string path);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback);
    double number(const std::string& key);  // required
    long integer(const std::string& key, long fallback);
    std::uint64_t seed(const std::string& key, std::uint64_t fallback);
    std::string text(const std::string& key, const std::string& fallback);
    std::string text(const std::string& key);
    bool flag(const std::string& key, bool fallback);
    ConfigReader child(const std::string& key);  // missing child reads as {}

    /// Range checks; message names the field.
    double positive(const std::string& key, double fallback);
    double non_negative(const std::string& key, double fallback);

    void finish() const;
    std::string field(const std::string& key) const;

private:
    const nlohmann::json& at(const std::string& key);

    nlohmann::json j_;
    std::string path_;
    std::set<std::string> used_;
};

nlohmann::json load_config(const std::filesystem::path& path);

/// sha256 of the canonical (sorted, compact) dump.
std::string config_digest(const nlohmann::json& j);

}  // namespace roughslab::cli
