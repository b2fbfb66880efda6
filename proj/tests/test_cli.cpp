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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "roughslab_cli_test.log";
    const std::string cmd = std::string(ROUGHSLAB_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    std::ifstream is(log);
    std::stringstream ss;
    ss << is.rdbuf();
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
}

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / "roughslab_cli_test";
    fs::create_directories(d);
    return d;
}

fs::path put(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("gen-surface is deterministic and stamps its provenance") {
    const auto out1 = scratch() / "s1.txt", out2 = scratch() / "s2.txt";
    const auto cfg = put("gen.json", R"({"n_points": 64, "spacing_m": 0.0003, "rms_height_m": 0.002,
                                        "corr_length_m": 0.005, "seed": 5})");
    REQUIRE(run("--config " + cfg.string() + " gen-surface -o " + out1.string()).code == 0);
    const std::string a = slurp(out1);
    REQUIRE(run("--config " + cfg.string() + " gen-surface -o " + out1.string()).code == 0);
    CHECK(a == slurp(out1));
    // the output path is part of the effective config
    REQUIRE(run("--config " + cfg.string() + " gen-surface -o " + out2.string()).code == 0);
    const std::string b = slurp(out2);
    CHECK(a.substr(a.find('\n')) == b.substr(b.find('\n')));
    CHECK(a.rfind("## tool roughslab version ", 0) == 0);
    CHECK(a.find("config_sha256 ") != std::string::npos);
    CHECK(a.find(" seed 5") != std::string::npos);

    const auto out3 = scratch() / "s3.txt";
    REQUIRE(run("--config " + cfg.string() + " gen-surface --seed 6 -o " + out3.string()).code == 0);
    CHECK(slurp(out3) != a);
    // leaves no temporary behind
    for (const auto& e : fs::directory_iterator(scratch()))
        CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("schema errors exit with status 2") {
    const auto bad_key = put("bad_key.json", R"({"n_points": 64, "rms_height_m": 0.002, "corr_length_m": 0.005, "colour": 3})");
    const Run a = run("--config " + bad_key.string() + " gen-surface -o " + (scratch() / "x.txt").string());
    CHECK(a.code == 2);
    CHECK(a.out.find("colour") != std::string::npos);

    const auto negative = put("neg.json", R"({"n_points": 64, "rms_height_m": -0.002, "corr_length_m": 0.005})");
    CHECK(run("--config " + negative.string() + " gen-surface -o " + (scratch() / "x.txt").string()).code == 2);

    const auto broken = put("broken.json", "{ \"n_points\": ");
    CHECK(run("--config " + broken.string() + " gen-surface").code == 2);
    CHECK(!fs::exists(scratch() / "x.txt"));

    const auto scene = put("scene.json", R"({"frequency_ghz": 28,
      "transmitter": {"position": [1, 1, 1.5], "boresight": [1, 0, 0]},
      "receivers": {"x": [0, 4], "y": [0, 4]},
      "surfaces": {"pb": {"kind": "rough_slab", "material": "plasterboard", "thickness": 0.1,
                          "reflection": {"30": "missing_r.model"}, "transmission": {"30": "missing_t.model"}}},
      "walls": [{"name": "divider", "surface": "pb", "from": [2, 0], "to": [2, 4], "z": [0, 3]}]})");
    const Run r = run("raytrace " + scene.string() + " --mode with_diffuse -o " + (scratch() / "m.rss").string());
    CHECK(r.code == 2);
    CHECK(r.out.find("divider") != std::string::npos);
}

TEST_CASE("a diverging run exits with status 3 and names the step") {
    const auto cfg = put("unstable.json", R"({"frequency_ghz": 28, "theta_i_deg": 0, "slab": "glass",
      "thickness_m": 0.01, "aperture_cells": 64,
      "simulation": {"cells_per_wavelength": 10, "courant": 1.3, "allow_unstable": true},
      "output": {"prefix": ")" + (scratch() / "unstable").string() + R"("}})");
    const Run r = run("--config " + cfg.string() + " fdtd");
    CHECK(r.code == 3);
    CHECK(r.out.find("step") != std::string::npos);
    CHECK(!fs::exists(scratch() / "unstable_r.pat"));
}
