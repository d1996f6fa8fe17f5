// SPDX-License-Identifier: Apache-2.0
//
// hybridgnn: graph neural network hybrid beamforming for wideband MIMO-OFDM
// Copyright (C) 2026 The hybridgnn authors
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

#include "hybridgnn/errors.hpp"
#include "hybridgnn/model_io.hpp"

#include "catch_amalgamated.hpp"

#include <cstring>
#include <unistd.h>
#include <fstream>
#include <iterator>

using namespace hbf;

namespace
{

struct TempFile
{
    std::filesystem::path path;
    explicit TempFile(const std::string &name)
        : path(std::filesystem::temp_directory_path() / ("hybridgnn_" + name + "_" + std::to_string(::getpid())))
    {
    }
    ~TempFile() { std::filesystem::remove(path); }
};

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

void spit(const std::filesystem::path &p, const std::string &bytes)
{
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GnnModel sample_model()
{
    Rng rng(1);
    return init_model(GnnDims::of(SystemConfig::desk()), 2, rng);
}

} // namespace

TEST_CASE("model round trip is bit-exact", "[model_io]")
{
    TempFile f("roundtrip");
    const GnnModel m = sample_model();
    model_save(f.path, m, {{"epochs", 3}});
    const GnnModel back = model_load(f.path, m.dims);
    CHECK(back.dims == m.dims);
    CHECK(back.layers == m.layers);
    const auto a = m.parameters();
    const auto b = back.parameters();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(*a[i] == *b[i]);

    const SystemConfig cfg = SystemConfig::desk();
    Rng c(2);
    const auto ch = generate_channel(cfg, c);
    Rng r1(3), r2(3);
    const auto x = forward(ch, m, r1);
    const auto y = forward(ch, back, r2);
    CHECK(x.rf == y.rf);
    CHECK(x.baseband == y.baseband);
}

TEST_CASE("model header carries shape and training metadata", "[model_io]")
{
    TempFile f("header");
    const GnnModel m = sample_model();
    model_save(f.path, m, {{"seed", 42}, {"learning_rate", 2e-4}});
    const nlohmann::json h = model_header(f.path);
    CHECK(h.at("dims").at("n_tx") == 16);
    CHECK(h.at("dims").at("n_streams") == 2);
    CHECK(h.at("layers") == 2);
    CHECK(h.at("activation") == "relu");
    CHECK(h.at("parameter_count").get<std::size_t>() == m.parameter_count());
    CHECK(h.at("widths").at("analog_message") == nlohmann::json{200, 400, 400, 32});
    CHECK(h.at("training").at("seed") == 42);

    // Payload is the header followed by one little-endian double per parameter.
    const std::string bytes = slurp(f.path);
    CHECK(bytes.substr(0, 4) == "SQNN");
    std::uint64_t len = 0;
    std::memcpy(&len, bytes.data() + 8, 8);
    CHECK(bytes.size() == 16 + len + 8 * m.parameter_count());
}

TEST_CASE("dimension mismatch is a configuration error", "[model_io]")
{
    TempFile f("dims");
    model_save(f.path, sample_model());
    GnnDims other = GnnDims::of(SystemConfig::terahertz_reference());
    CHECK_THROWS_AS(model_load(f.path, other), ConfigError);
    CHECK_NOTHROW(model_load(f.path));
}

TEST_CASE("corrupt model files are format errors", "[model_io]")
{
    TempFile good("good"), bad("bad");
    model_save(good.path, sample_model());
    const std::string bytes = slurp(good.path);
    std::uint64_t len = 0;
    std::memcpy(&len, bytes.data() + 8, 8);

    auto expect_format_error = [&](const std::string &content) {
        spit(bad.path, content);
        CHECK_THROWS_AS(model_load(bad.path), FormatError);
    };
    std::string magic = bytes;
    magic[0] = 'X';
    expect_format_error(magic);

    std::string version = bytes;
    version[4] = 9;
    expect_format_error(version);

    expect_format_error(bytes.substr(0, bytes.size() - 3));
    expect_format_error(bytes.substr(0, 12));
    expect_format_error(bytes + "extra");
    expect_format_error("");

    std::string header = bytes;
    header[16] = '!';
    expect_format_error(header);

    // Valid JSON with inconsistent widths.
    nlohmann::json h = nlohmann::json::parse(bytes.substr(16, len));
    h["widths"]["analog_message"][1] = 7;
    const std::string text = h.dump();
    std::string rebuilt = bytes.substr(0, 8);
    const std::uint64_t n = text.size();
    rebuilt.append(reinterpret_cast<const char *>(&n), 8);
    rebuilt += text;
    rebuilt += bytes.substr(16 + len);
    expect_format_error(rebuilt);

    h.erase("widths");
    const std::string text2 = h.dump();
    std::string rebuilt2 = bytes.substr(0, 8);
    const std::uint64_t n2 = text2.size();
    rebuilt2.append(reinterpret_cast<const char *>(&n2), 8);
    rebuilt2 += text2;
    rebuilt2 += bytes.substr(16 + len);
    expect_format_error(rebuilt2);
}

TEST_CASE("missing model file", "[model_io]")
{
    CHECK_THROWS(model_load("/nonexistent/dir/model.bin"));
}
