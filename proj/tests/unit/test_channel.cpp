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

#include "hybridgnn/channel.hpp"
#include "hybridgnn/errors.hpp"

#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numeric>

using namespace hbf;
using Catch::Approx;

TEST_CASE("subcarrier grid is centered on the carrier", "[channel]")
{
    const auto one = subcarrier_frequencies(300e9, 30e9, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 300e9);

    const auto two = subcarrier_frequencies(300e9, 30e9, 2);
    CHECK(two[0] == Approx(292.5e9).epsilon(1e-15));
    CHECK(two[1] == Approx(307.5e9).epsilon(1e-15));

    const auto eight = subcarrier_frequencies(300e9, 30e9, 8);
    CHECK(eight.front() == Approx(286.875e9).epsilon(1e-15));
    CHECK(eight.back() == Approx(313.125e9).epsilon(1e-15));
    const double mean = std::accumulate(eight.begin(), eight.end(), 0.0) / 8.0;
    CHECK(mean == Approx(300e9).epsilon(1e-15));
    for (std::size_t k = 1; k < eight.size(); ++k)
        CHECK(eight[k] - eight[k - 1] == Approx(30e9 / 8).epsilon(1e-12));

    CHECK_THROWS_AS(subcarrier_frequencies(300e9, 30e9, 0), ContractViolation);
}

TEST_CASE("array response closed forms", "[channel]")
{
    const double lambda = 1e-3;
    const double d = lambda / 2;
    const ComplexVector single = array_response({1, 1}, d, lambda, 0.4, 1.1);
    REQUIRE(single.size() == 1);
    CHECK(std::abs(single(0) - Complex(1.0, 0.0)) < 1e-15);

    const ComplexVector broadside = array_response({3, 4}, d, lambda, 0.0, kPi / 2);
    for (Eigen::Index i = 0; i < broadside.size(); ++i)
        CHECK(std::abs(broadside(i) - Complex(1.0 / std::sqrt(12.0), 0.0)) < 1e-15);

    const ComplexVector endfire = array_response({2, 1}, d, lambda, kPi / 2, kPi / 2);
    CHECK(std::abs(endfire(0) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(endfire(1) - Complex(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
}

TEST_CASE("array response entry order and norm", "[channel]")
{
    Rng rng(3);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    const double lambda = 1e-3;
    const double d = 0.6e-3;
    for (int trial = 0; trial < 200; ++trial)
    {
        const double az = ang(rng), el = ang(rng);
        const ArrayGrid grid{3, 5};
        const ComplexVector a = array_response(grid, d, lambda, az, el);
        CHECK(std::abs(a.norm() - 1.0) <= 1e-12);
        for (int q = 0; q < grid.cols; ++q)
            for (int p = 0; p < grid.rows; ++p)
            {
                const double phase = 2 * kPi / lambda * d * (p * std::sin(az) * std::sin(el) + q * std::cos(el));
                CHECK(std::abs(a(p + grid.rows * q) - std::polar(1.0 / std::sqrt(15.0), phase)) < 1e-12);
            }
    }
}

TEST_CASE("ray angles: counts and the zero-spread limit", "[channel]")
{
    Rng rng(5);
    const auto rays = sample_ray_angles(rng, 2, 2, 0.1);
    CHECK(rays.size() == 4);
    CHECK(rays[0].cluster == 0);
    CHECK(rays[3].cluster == 1);

    Rng rng0(9);
    const auto tight = sample_ray_angles(rng0, 3, 4, 0.0);
    for (int c = 0; c < 3; ++c)
        for (int l = 1; l < 4; ++l)
        {
            const Ray &a = tight[static_cast<std::size_t>(4 * c)];
            const Ray &b = tight[static_cast<std::size_t>(4 * c + l)];
            CHECK(a.aod_azimuth == b.aod_azimuth);
            CHECK(a.aod_elevation == b.aod_elevation);
            CHECK(a.aoa_azimuth == b.aoa_azimuth);
            CHECK(a.aoa_elevation == b.aoa_elevation);
        }
}

TEST_CASE("ray offsets have the Laplacian mean absolute deviation", "[channel]")
{
    const double spread = 10.0 * kPi / 180.0;
    const int rays = 25000;  // four offsets per ray
    Rng rng(17);
    Rng replay = rng;
    const auto drawn = sample_ray_angles(rng, 1, rays, spread);

    // Cluster means are the first four draws.
    std::uniform_real_distribution<double> azimuth(-kPi, kPi);
    std::uniform_real_distribution<double> elevation(0.0, kPi);
    const double aod_az = azimuth(replay), aod_el = elevation(replay);
    const double aoa_az = azimuth(replay), aoa_el = elevation(replay);
    CHECK(aod_az >= -kPi);
    CHECK(aod_el >= 0.0);

    double mad = 0.0, mean = 0.0;
    for (const Ray &r : drawn)
    {
        const double o[] = {r.aod_azimuth - aod_az, r.aod_elevation - aod_el, r.aoa_azimuth - aoa_az,
                            r.aoa_elevation - aoa_el};
        for (double v : o)
        {
            mad += std::abs(v);
            mean += v;
        }
    }
    mad /= 4.0 * rays;
    mean /= 4.0 * rays;
    CHECK(std::abs(mad / spread - 1.0) < 0.02);
    CHECK(std::abs(mean) < 0.02 * spread);
}

TEST_CASE("single ray gives the rank-one closed form", "[channel]")
{
    SystemConfig cfg = SystemConfig::desk();
    cfg.n_clusters = 1;
    cfg.n_rays = 1;
    cfg.n_subcarriers = 1;
    Ray r;
    r.aod_azimuth = 0.3;
    r.aod_elevation = 1.2;
    r.aoa_azimuth = -0.7;
    r.aoa_elevation = 2.0;
    r.gain = 1.0;
    const ComplexStack h = channel_from_rays(cfg, {r});
    REQUIRE(h.size() == 1);
    const double lambda = kSpeedOfLight / cfg.carrier_hz;
    const ComplexVector ar = array_response(cfg.rx, cfg.spacing(), lambda, r.aoa_azimuth, r.aoa_elevation);
    const ComplexVector at = array_response(cfg.tx, cfg.spacing(), lambda, r.aod_azimuth, r.aod_elevation);
    const ComplexMatrix expect = std::sqrt(double(cfg.n_tx() * cfg.n_rx())) * ar * at.adjoint();
    CHECK((h[0] - expect).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(h[0].squaredNorm() == Approx(double(cfg.n_tx() * cfg.n_rx())).epsilon(1e-12));
    Eigen::JacobiSVD<ComplexMatrix> svd(h[0]);
    CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));
}

TEST_CASE("zero bandwidth makes every subcarrier identical", "[channel]")
{
    SystemConfig cfg = SystemConfig::terahertz_reference();
    cfg.bandwidth_hz = 0.0;
    Rng rng(23);
    const auto ch = generate_channel(cfg, rng);
    REQUIRE(ch.h.size() == 8);
    for (std::size_t k = 1; k < ch.h.size(); ++k)
        CHECK(ch.h[k] == ch.h[0]);
}

TEST_CASE("nonzero bandwidth makes subcarriers differ", "[channel]")
{
    Rng rng(24);
    const auto ch = generate_channel(SystemConfig::terahertz_reference(), rng);
    CHECK((ch.h.front() - ch.h.back()).norm() > 1e-3);
}

TEST_CASE("seeded generation is reproducible", "[channel]")
{
    const SystemConfig cfg = SystemConfig::desk();
    Rng a = derive_rng(42, 7), b = derive_rng(42, 7), c = derive_rng(42, 8);
    const auto x = generate_channel(cfg, a);
    const auto y = generate_channel(cfg, b);
    const auto z = generate_channel(cfg, c);
    CHECK(x.rays == y.rays);
    for (std::size_t k = 0; k < x.h.size(); ++k)
        CHECK(x.h[k] == y.h[k]);
    CHECK(x.h[0] != z.h[0]);
}

TEST_CASE("ensemble channel power is normalized per subcarrier", "[channel]")
{
    const SystemConfig cfg = SystemConfig::terahertz_reference();
    const int n = 10000;
    std::vector<double> per_k(static_cast<std::size_t>(cfg.n_subcarriers), 0.0);
    for (int i = 0; i < n; ++i)
    {
        Rng rng = derive_rng(99, static_cast<std::uint64_t>(i));
        const auto ch = generate_channel(cfg, rng);
        for (std::size_t k = 0; k < per_k.size(); ++k)
            per_k[k] += ch.h[k].squaredNorm() / (cfg.n_tx() * cfg.n_rx());
    }
    for (double s : per_k)
        CHECK(std::abs(s / n - 1.0) < 0.05);
}

TEST_CASE("system config validation", "[channel]")
{
    CHECK_NOTHROW(SystemConfig::terahertz_reference().validate());
    CHECK_NOTHROW(SystemConfig::desk().validate());
    SystemConfig bad = SystemConfig::desk();
    bad.n_streams = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = SystemConfig::desk();
    bad.n_rf = 17;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = SystemConfig::desk();
    bad.bandwidth_hz = 2.0 * bad.carrier_hz;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = SystemConfig::desk();
    bad.n_subcarriers = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = SystemConfig::desk();
    bad.element_spacing_m = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = SystemConfig::desk();
    bad.cluster_power = {1.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("default element spacing is half the carrier wavelength", "[channel]")
{
    const SystemConfig cfg = SystemConfig::terahertz_reference();
    CHECK(cfg.spacing() == Approx(kSpeedOfLight / 300e9 / 2).epsilon(1e-15));
    CHECK(cfg.n_tx() == 64);
    CHECK(cfg.n_rx() == 8);
}
