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
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace roughslab {

/// Library version, from the build.
const char* version();

std::string sha256_hex(std::string_view data);

struct Provenance {
    std::string config_digest;  // sha256 of the canonical config text
    std::uint64_t seed = 0;
};

/// `## tool roughslab version V config_sha256 H seed S`. Every reader skips
/// `##` lines it does not know.
std::string provenance_line(const Provenance& p);

/// Write to a sibling temp file, flush, then rename over `path`. The target is
/// untouched if `body` throws.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace roughslab
