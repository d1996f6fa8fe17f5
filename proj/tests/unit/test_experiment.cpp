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
#include "hybridgnn/experiment.hpp"

#include "catch_amalgamated.hpp"

#include <sstream>

using namespace hbf;
using Catch::Approx;

namespace
{

ExperimentSpec small_spec(ExperimentKind kind, std::vector<double> grid)
{
    ExperimentSpec s;
    s.kind = kind;
    s.system = SystemConfig::desk();
    s.grid = std::move(grid);
    s.realizations = 5;
    s.seed = 3;
    return s;
}

std::vector<std::string> lines_of(const std::string &text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
        out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("name parsing", "[experiment]")
{
    for (auto d : {Designer::Gnn, Designer::Amo, Designer::AvSingle, Designer::FullyDigital})
        CHECK(parse_designer(to_string(d)) == d);
    for (auto k : {ExperimentKind::SnrSweep, ExperimentKind::SquintSweep, ExperimentKind::Convergence,
                   ExperimentKind::Runtime})
        CHECK(parse_experiment_kind(to_string(k)) == k);
    CHECK(parse_designers("amo,fully-digital") == std::vector<Designer>{Designer::Amo, Designer::FullyDigital});
    CHECK(parse_grid("-10,0,2.5") == std::vector<double>{-10.0, 0.0, 2.5});
    CHECK_THROWS_AS(parse_designer("mmse"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_kind("sweep"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,x"), ConfigError);
    CHECK_THROWS_AS(parse_designers(""), ConfigError);
}

TEST_CASE("experiment validation", "[experiment]")
{
    CHECK_NOTHROW(small_spec(ExperimentKind::SnrSweep, {0.0}).validate());
    ExperimentSpec s = small_spec(ExperimentKind::SnrSweep, {});
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_spec(ExperimentKind::SnrSweep, {0.0});
    s.realizations = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_spec(ExperimentKind::SquintSweep, {0.1, 2.0});
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_spec(ExperimentKind::SquintSweep, {-0.1});
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_spec(ExperimentKind::SnrSweep, {0.0});
    s.designers = {Designer::Gnn};
    CHECK_THROWS_AS(run_eval(s, DesignerSet{}), ConfigError);
    CHECK_THROWS_AS(run_eval(small_spec(ExperimentKind::Convergence, {0.0}), DesignerSet{}), ConfigError);
}

TEST_CASE("single-point evaluation", "[experiment]")
{
    ExperimentSpec s = small_spec(ExperimentKind::SnrSweep, {0.0});
    s.realizations = 1;
    const auto r = run_eval(s, DesignerSet{});
    REQUIRE(r.size() == 1);
    CHECK(r[0].designer == Designer::FullyDigital);
    CHECK(r[0].samples == 1);
    CHECK(r[0].mean_se >= 0.0);
    CHECK(r[0].se_std_error == 0.0);
    CHECK(!r[0].peak_bytes);

    Rng crng = derive_rng(3, 0);
    const auto ch = generate_channel(s.system, crng);
    CHECK(r[0].mean_se == fully_digital(ch.h, 2, LinkBudget{0.0}).spectral_efficiency);
}

TEST_CASE("spectral efficiency rises with SNR", "[experiment]")
{
    ExperimentSpec s = small_spec(ExperimentKind::SnrSweep, {-10, -5, 0, 5, 10});
    s.designers = {Designer::FullyDigital, Designer::AvSingle, Designer::Amo};
    const auto r = run_eval(s, DesignerSet{});
    REQUIRE(r.size() == 15);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t g = 1; g < 5; ++g)
            CHECK(r[g * 3 + j].mean_se > r[(g - 1) * 3 + j].mean_se);
    for (std::size_t g = 0; g < 5; ++g)
    {
        CHECK(r[g * 3].mean_se >= r[g * 3 + 1].mean_se);
        CHECK(r[g * 3].mean_se >= r[g * 3 + 2].mean_se);
    }
}

TEST_CASE("evaluation is reproducible and timing does not touch results", "[experiment]")
{
    ExperimentSpec s = small_spec(ExperimentKind::SquintSweep, {0.0, 0.1});
    s.designers = {Designer::AvSingle, Designer::Amo};
    const auto a = run_eval(s, DesignerSet{});
    const auto b = run_eval(s, DesignerSet{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].mean_se == b[i].mean_se);
        CHECK(a[i].se_std_error == b[i].se_std_error);
    }
}

TEST_CASE("GNN designer runs through evaluation", "[experiment]")
{
    ExperimentSpec s = small_spec(ExperimentKind::SnrSweep, {0.0});
    s.designers = {Designer::Gnn};
    Rng rng(4);
    const GnnModel m = init_model(GnnDims::of(s.system), 2, rng);
    const auto r = run_eval(s, DesignerSet{&m, {}});
    REQUIRE(r.size() == 1);
    CHECK(r[0].mean_se > 0.0);
    CHECK(r[0].mean_seconds > 0.0);

    s.system = SystemConfig::terahertz_reference();
    CHECK_THROWS_AS(run_eval(s, DesignerSet{&m, {}}), ConfigError);
}

TEST_CASE("benchmark statistics", "[experiment]")
{
    ExperimentSpec s = small_spec(ExperimentKind::Runtime, {0.0});
    s.designers = {Designer::AvSingle};
    s.realizations = 1;
    const auto one = run_bench(s, DesignerSet{});
    REQUIRE(one.size() == 1);
    CHECK(one[0].std_seconds == 0.0);
    CHECK(one[0].mean_seconds > 0.0);

    const SampleStats st = sample_stats({1.0, 2.0, 3.0, 4.0});
    CHECK(st.mean == 2.5);
    CHECK(st.stddev == Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
    CHECK(sample_stats({7.0}).stddev == 0.0);
}

TEST_CASE("record CSV layout", "[experiment]")
{
    RunRecord r;
    r.designer = Designer::Amo;
    r.grid_value = -5.0;
    r.samples = 10;
    r.mean_se = 1.5;
    r.se_std_error = 0.25;
    r.mean_seconds = 0.001;
    r.std_seconds = 0.0;
    std::ostringstream os;
    write_records_csv(os, {r}, {{"seed", 1}}, "snr_db");
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "# {\"seed\":1}");
    CHECK(lines[1] == "designer,grid_name,grid_value,samples,mean_se,se_stderr,mean_seconds,std_seconds,peak_bytes");
    CHECK(lines[2] == "amo,snr_db,-5,10,1.5,0.25,0.001,0,");
}

TEST_CASE("trace CSV layout", "[experiment]")
{
    std::ostringstream os;
    write_trace_csv(os, {EpochRecord{1, 2e-4, -3.5, 3.25}}, nlohmann::json::object());
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[1] == "epoch,lr,train_loss,holdout_SE");
    CHECK(lines[2] == "1,0.00020000000000000001,-3.5,3.25");
}

TEST_CASE("configuration JSON round trips", "[experiment]")
{
    TrainConfig t;
    t.learning_rate = 1e-3;
    t.epochs = 450;
    t.seed = 99;
    const TrainConfig t2 = train_config_from_json(to_json(t));
    CHECK(t2.learning_rate == t.learning_rate);
    CHECK(t2.epochs == 450);
    CHECK(t2.seed == 99);
    CHECK(to_json(t2) == to_json(t));

    AmoConfig a;
    a.max_outer = 7;
    CHECK(amo_config_from_json(to_json(a)).max_outer == 7);
    CHECK_THROWS_AS(amo_config_from_json({{"max_outer", 0}}), ConfigError);
    CHECK_THROWS_AS(train_config_from_json({{"batch_size", "many"}}), ConfigError);
}
