// SPDX-License-Identifier: Apache-2.0
//
// hmsrelay - reconfigurable Huygens metasurface relay simulator
// Copyright (C) 2026 The hmsrelay authors
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

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        int code = -1;
        std::string output;
    };

    Outcome cli(const std::string &args)
    {
        const char *exe = std::getenv("HMS_CLI");
        REQUIRE(exe != nullptr);
        const std::string cmd = std::string(exe) + " " + args + " 2>&1";
        Outcome o;
        FILE *pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        char buf[4096];
        while (std::fgets(buf, sizeof buf, pipe))
            o.output += buf;
        const int status = pclose(pipe);
        o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return o;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path scratch(const std::string &name)
    {
        const fs::path d = fs::temp_directory_path() / ("hmsrelay_cli_" + name);
        fs::remove_all(d);
        return d;
    }
}

TEST_CASE("lut output is byte-identical across runs", "[cli]")
{
    const fs::path a = scratch("lut_a"), b = scratch("lut_b");
    REQUIRE(cli("lut --out " + a.string()).code == 0);
    REQUIRE(cli("lut --out " + b.string()).code == 0);
    for (const char *f : {"lut_lens.json", "lut_mirror.json"})
    {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f).find("\"config_hash\"") != std::string::npos);
    }
}

TEST_CASE("missing config file is a config error naming the path", "[cli]")
{
    const Outcome o = cli("lut --config /nonexistent/hms.json --out " + scratch("missing").string());
    CHECK(o.code == 2);
    CHECK(o.output.find("/nonexistent/hms.json") != std::string::npos);
}

TEST_CASE("usage errors exit with 2", "[cli]")
{
    CHECK(cli("lut --bogus").code == 2);
    CHECK(cli("").code == 2);
    CHECK(cli("teleport").code == 2);
    const Outcome bad = cli("beam --set array.n_cols=0 --out " + scratch("bad").string());
    CHECK(bad.code == 2);
    CHECK(bad.output.find("n_cols") != std::string::npos);
}

TEST_CASE("overrides change the config hash", "[cli]")
{
    const fs::path a = scratch("hash_a"), b = scratch("hash_b");
    REQUIRE(cli("budget --out " + a.string()).code == 0);
    REQUIRE(cli("budget --set radio.p_t_dbm=10 --out " + b.string()).code == 0);
    CHECK(slurp(a / "budget.json") != slurp(b / "budget.json"));
}

TEST_CASE("every subcommand writes stamped output", "[cli]")
{
    const fs::path d = scratch("all");
    CHECK(cli("pattern --set pattern.freq_points=3 --set pattern.voltage_step_V=2 --out " + d.string()).code == 0);
    CHECK(cli("beam --out " + d.string()).code == 0);
    CHECK(cli("budget --out " + d.string()).code == 0);
    CHECK(cli("scenario --set scenario.trials=200 --out " + d.string()).code == 0);
    CHECK(cli("protocol --set protocol.trials=5 --out " + d.string()).code == 0);
    for (const char *f : {"pattern.csv", "beam_pattern.csv", "coverage.csv", "blockage.csv"})
    {
        REQUIRE(fs::exists(d / f));
        CHECK(slurp(d / f).rfind("# hmsrelay ", 0) == 0);
    }
    for (const char *f : {"beam.json", "budget.json", "scenario.json", "protocol_trace.json", "protocol_summary.json"})
    {
        REQUIRE(fs::exists(d / f));
        CHECK(slurp(d / f).find("\"tool_version\"") != std::string::npos);
    }
    for (const auto &e : fs::directory_iterator(d))
        CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("failed runs leave no files behind", "[cli]")
{
    const fs::path d = scratch("fail");
    CHECK(cli("scenario --set scenario.file=/nonexistent/floor.json --out " + d.string()).code == 2);
    CHECK((!fs::exists(d) || fs::is_empty(d)));
}

TEST_CASE("selftest reports every criterion and exits accordingly", "[cli]")
{
    const Outcome o = cli("selftest");
    int lines = 0, failed = 0;
    std::istringstream in(o.output);
    for (std::string line; std::getline(in, line);)
    {
        lines += line.rfind("PASS [", 0) == 0 || line.rfind("FAIL [", 0) == 0;
        failed += line.rfind("FAIL [", 0) == 0;
    }
    CHECK(lines == 12);
    CHECK(o.code == (failed == 0 ? 0 : 1));
}
