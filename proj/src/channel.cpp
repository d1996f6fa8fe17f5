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

#include <string>

namespace hbf
{

Rng derive_rng(std::uint64_t master, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

double SystemConfig::power_of_cluster(int i) const
{
    return cluster_power.empty() ? 1.0 : cluster_power.at(static_cast<std::size_t>(i));
}

void SystemConfig::validate() const
{
    auto fail = [](const std::string &msg) { throw ConfigError("invalid system config: " + msg); };
    if (tx.rows < 1 || tx.cols < 1 || rx.rows < 1 || rx.cols < 1)
        fail("array grids must have at least one element per axis");
    if (n_streams < 1 || n_streams > n_rf || n_rf > n_tx())
        fail("need 1 <= N_s <= N_RF <= N_t");
    if (n_streams > n_rx())
        fail("need N_s <= N_r");
    if (n_subcarriers < 1)
        fail("need K >= 1");
    if (!(carrier_hz > 0.0))
        fail("carrier frequency must be positive");
    if (!(bandwidth_hz >= 0.0) || !(bandwidth_hz < 2.0 * carrier_hz))
        fail("need 0 <= B < 2 f_c");
    if (!(spacing() > 0.0))
        fail("element spacing must be positive");
    if (n_clusters < 1 || n_rays < 1)
        fail("need at least one cluster and one ray");
    if (!(angular_spread_rad >= 0.0))
        fail("angular spread must be non-negative");
    if (!cluster_power.empty())
    {
        if (static_cast<int>(cluster_power.size()) != n_clusters)
            fail("cluster_power must list one value per cluster");
        for (double p : cluster_power)
            if (!(p > 0.0))
                fail("cluster powers must be positive");
    }
}

SystemConfig SystemConfig::terahertz_reference() { return SystemConfig{}; }

SystemConfig SystemConfig::desk()
{
    SystemConfig cfg;
    cfg.tx = {4, 4};
    cfg.rx = {2, 2};
    cfg.n_rf = 2;
    cfg.n_streams = 2;
    cfg.n_subcarriers = 4;
    return cfg;
}

std::vector<double> subcarrier_frequencies(double carrier_hz, double bandwidth_hz, int count)
{
    if (count < 1)
        throw ContractViolation("subcarrier_frequencies: need at least one subcarrier");
    if (bandwidth_hz < 0.0)
        throw ContractViolation("subcarrier_frequencies: bandwidth must be non-negative");
    std::vector<double> f(static_cast<std::size_t>(count));
    const double spacing = bandwidth_hz / count;
    for (int k = 0; k < count; ++k)
        f[static_cast<std::size_t>(k)] = carrier_hz - 0.5 * bandwidth_hz + (k + 0.5) * spacing;
    return f;
}

std::vector<Ray> sample_ray_angles(Rng &rng, int n_clusters, int n_rays, double angular_spread)
{
    std::uniform_real_distribution<double> azimuth(-kPi, kPi);
    std::uniform_real_distribution<double> elevation(0.0, kPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Inverse-CDF Laplacian draw with scale b: mean |offset| equals b.
    auto laplace = [&](double b) {
        double u = unit(rng) - 0.5;
        while (u == -0.5)
            u = unit(rng) - 0.5;
        const double mag = -b * std::log1p(-2.0 * std::abs(u));
        return u < 0.0 ? -mag : mag;
    };

    std::vector<Ray> rays;
    rays.reserve(static_cast<std::size_t>(n_clusters * n_rays));
    for (int i = 0; i < n_clusters; ++i)
    {
        const double aod_az = azimuth(rng);
        const double aod_el = elevation(rng);
        const double aoa_az = azimuth(rng);
        const double aoa_el = elevation(rng);
        for (int l = 0; l < n_rays; ++l)
        {
            Ray r;
            r.cluster = i;
            r.aod_azimuth = aod_az + laplace(angular_spread);
            r.aod_elevation = aod_el + laplace(angular_spread);
            r.aoa_azimuth = aoa_az + laplace(angular_spread);
            r.aoa_elevation = aoa_el + laplace(angular_spread);
            rays.push_back(r);
        }
    }
    return rays;
}

ComplexStack channel_from_rays(const SystemConfig &cfg, const std::vector<Ray> &rays)
{
    if (rays.empty())
        throw ContractViolation("channel_from_rays: no rays");
    const auto freqs = subcarrier_frequencies(cfg.carrier_hz, cfg.bandwidth_hz, cfg.n_subcarriers);
    const double d = cfg.spacing();
    const double norm = std::sqrt(static_cast<double>(cfg.n_tx()) * cfg.n_rx() / static_cast<double>(rays.size()));

    ComplexStack h;
    h.reserve(freqs.size());
    for (double f : freqs)
    {
        const double lambda = kSpeedOfLight / f;
        ComplexMatrix hk = ComplexMatrix::Zero(cfg.n_rx(), cfg.n_tx());
        for (const Ray &r : rays)
        {
            const ComplexVector ar = array_response(cfg.rx, d, lambda, r.aoa_azimuth, r.aoa_elevation);
            const ComplexVector at = array_response(cfg.tx, d, lambda, r.aod_azimuth, r.aod_elevation);
            hk.noalias() += r.gain * ar * at.adjoint();
        }
        h.push_back(norm * hk);
    }
    return h;
}

ChannelRealization generate_channel(const SystemConfig &cfg, Rng &rng)
{
    ChannelRealization ch;
    ch.rays = sample_ray_angles(rng, cfg.n_clusters, cfg.n_rays, cfg.angular_spread_rad);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Ray &r : ch.rays)
    {
        const double sd = std::sqrt(0.5 * cfg.power_of_cluster(r.cluster));
        const double re = normal(rng);
        const double im = normal(rng);
        r.gain = Complex(sd * re, sd * im);
    }
    ch.h = channel_from_rays(cfg, ch.rays);
    return ch;
}

double normalized_channel_power(const ChannelRealization &ch)
{
    if (ch.h.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto &hk : ch.h)
        acc += hk.squaredNorm() / static_cast<double>(hk.rows() * hk.cols());
    return acc / static_cast<double>(ch.h.size());
}

} // namespace hbf
