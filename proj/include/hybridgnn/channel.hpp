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

#pragma once

// Wideband clustered MIMO-OFDM channel with uniform planar arrays.
//
// Ray gains and angles are drawn once per realization and shared by all
// subcarriers; only the wavelength changes with frequency, which is what
// makes a center-frequency analog beam squint across the band.

#include "hybridgnn/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace hbf
{

using Rng = std::mt19937_64;

// Independent stream for task `index` of a run seeded with `master`.
Rng derive_rng(std::uint64_t master, std::uint64_t index);

// M x N planar grid of antenna elements.
struct ArrayGrid
{
    int rows = 1;
    int cols = 1;

    int size() const { return rows * cols; }
    bool operator==(const ArrayGrid &) const = default;
};

struct SystemConfig
{
    ArrayGrid tx{8, 8};
    ArrayGrid rx{4, 2};
    int n_rf = 4;
    int n_streams = 4;
    int n_subcarriers = 8;
    double carrier_hz = 300e9;
    double bandwidth_hz = 30e9;
    // Unset means half the carrier wavelength.
    std::optional<double> element_spacing_m;
    int n_clusters = 2;
    int n_rays = 2;
    double angular_spread_rad = 10.0 * kPi / 180.0;
    // Per-cluster average power; empty means 1 for every cluster.
    std::vector<double> cluster_power;

    int n_tx() const { return tx.size(); }
    int n_rx() const { return rx.size(); }
    double spacing() const { return element_spacing_m.value_or(kSpeedOfLight / (2.0 * carrier_hz)); }
    double power_of_cluster(int i) const;

    // Throws ConfigError on any violated invariant.
    void validate() const;

    bool operator==(const SystemConfig &) const = default;

    // 8x8 transmit UPA, 4x2 receive UPA, 4 RF chains and streams, K = 8,
    // 300 GHz carrier, 30 GHz bandwidth.
    static SystemConfig terahertz_reference();
    // Reduced setting for CPU-scale training: 4x4 / 2x2 arrays, 2 RF chains
    // and streams, K = 4, same carrier and bandwidth.
    static SystemConfig desk();
};

struct Ray
{
    int cluster = 0;
    double aod_azimuth = 0.0;
    double aod_elevation = 0.0;
    double aoa_azimuth = 0.0;
    double aoa_elevation = 0.0;
    Complex gain{1.0, 0.0};

    bool operator==(const Ray &) const = default;
};

struct ChannelRealization
{
    std::vector<Ray> rays;
    // K matrices of size N_r x N_t.
    ComplexStack h;

    int subcarriers() const { return static_cast<int>(h.size()); }
};

// f_k = f_c - B/2 + (k - 1/2) B / K, k = 1..K.
std::vector<double> subcarrier_frequencies(double carrier_hz, double bandwidth_hz, int count);

// Unit-norm UPA response. Element (p, q) sits at vector index p + M q and has
// phase (2 pi / lambda) d (p sin(az) sin(el) + q cos(el)).
template <typename Scalar = double>
CVectorT<Scalar> array_response(ArrayGrid grid, Scalar spacing, Scalar wavelength, Scalar azimuth, Scalar elevation)
{
    using std::cos;
    using std::sin;
    using std::sqrt;
    const Scalar k = Scalar(2) * Scalar(kPi) / wavelength * spacing;
    const Scalar u = sin(azimuth) * sin(elevation);
    const Scalar v = cos(elevation);
    const Scalar amp = Scalar(1) / sqrt(Scalar(grid.size()));
    CVectorT<Scalar> a(grid.size());
    for (int q = 0; q < grid.cols; ++q)
        for (int p = 0; p < grid.rows; ++p)
            a(p + grid.rows * q) = std::polar(amp, k * (Scalar(p) * u + Scalar(q) * v));
    return a;
}

// Cluster means: azimuth U[-pi, pi), elevation U[0, pi), drawn separately for
// departure and arrival. Rays add independent Laplacian(0, spread) offsets.
// Gains are left at 1; generate_channel draws them.
std::vector<Ray> sample_ray_angles(Rng &rng, int n_clusters, int n_rays, double angular_spread);

// Builds H[k] for every subcarrier from fixed ray parameters.
ComplexStack channel_from_rays(const SystemConfig &cfg, const std::vector<Ray> &rays);

// Draws angles, then circularly-symmetric gains with the cluster variance.
ChannelRealization generate_channel(const SystemConfig &cfg, Rng &rng);

// Mean over subcarriers of ||H[k]||_F^2 / (N_t N_r).
double normalized_channel_power(const ChannelRealization &ch);

} // namespace hbf
