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

#include "run_config.hpp"

#include <fstream>

#include "roughslab/io.hpp"

namespace roughslab::cli {

ConfigReader::ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_.is_null()) j_ = nlohmann::json::object();
    if (!j_.is_object()) throw SchemaError((path_.empty() ? "config" : path_) + ": expected an object");
}

std::string ConfigReader::field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool ConfigReader::has(const std::string& key) const { return j_.contains(key); }

const nlohmann::json& ConfigReader::at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
}

double ConfigReader::number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return number(key);
}

double ConfigReader::number(const std::string& key) {
    if (!has(key)) throw SchemaError(field(key) + ": required");
    const auto& v = at(key);
    if (!v.is_number()) throw SchemaError(field(key) + ": expected a number");
    return v.get<double>();
}

long ConfigReader::integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(field(key) + ": expected an integer");
    return v.get<long>();
}

std::uint64_t ConfigReader::seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw SchemaError(field(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string ConfigReader::text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return text(key);
}

std::string ConfigReader::text(const std::string& key) {
    if (!has(key)) throw SchemaError(field(key) + ": required");
    const auto& v = at(key);
    if (!v.is_string()) throw SchemaError(field(key) + ": expected a string");
    return v.get<std::string>();
}

bool ConfigReader::flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) throw SchemaError(field(key) + ": expected true or false");
    return v.get<bool>();
}

ConfigReader ConfigReader::child(const std::string& key) {
    if (!has(key)) return ConfigReader(nlohmann::json::object(), field(key));
    return ConfigReader(at(key), field(key));
}

double ConfigReader::positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) throw SchemaError(field(key) + ": must be > 0");
    return v;
}

double ConfigReader::non_negative(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v >= 0.0)) throw SchemaError(field(key) + ": must be >= 0");
    return v;
}

void ConfigReader::finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
        if (!used_.count(it.key())) throw SchemaError(field(it.key()) + ": unknown key");
}

nlohmann::json load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot read config " + path.string());
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

std::string config_digest(const nlohmann::json& j) { return sha256_hex(j.dump()); }

}  // namespace roughslab::cli
