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

#include "hybridgnn/dataset.hpp"
#include "hybridgnn/errors.hpp"

#include "binary_io.hpp"

#include <fstream>

namespace hbf
{

namespace
{

constexpr std::string_view kMagic = "SQCH";
constexpr std::uint32_t kVersion = 1;

} // namespace

ChannelDataset generate_dataset(const SystemConfig &cfg, std::size_t count, std::uint64_t seed)
{
    cfg.validate();
    ChannelDataset ds{cfg, {}};
    ds.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        Rng rng = derive_rng(seed, i);
        ds.samples.push_back(generate_channel(cfg, rng));
    }
    return ds;
}

nlohmann::json to_json(const SystemConfig &cfg)
{
    nlohmann::json j;
    j["tx_grid"] = {cfg.tx.rows, cfg.tx.cols};
    j["rx_grid"] = {cfg.rx.rows, cfg.rx.cols};
    j["n_rf"] = cfg.n_rf;
    j["n_streams"] = cfg.n_streams;
    j["n_subcarriers"] = cfg.n_subcarriers;
    j["carrier_hz"] = cfg.carrier_hz;
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    if (cfg.element_spacing_m)
        j["element_spacing_m"] = *cfg.element_spacing_m;
    j["n_clusters"] = cfg.n_clusters;
    j["n_rays"] = cfg.n_rays;
    j["angular_spread_rad"] = cfg.angular_spread_rad;
    if (!cfg.cluster_power.empty())
        j["cluster_power"] = cfg.cluster_power;
    return j;
}

SystemConfig system_config_from_json(const nlohmann::json &j)
{
    SystemConfig cfg;
    try
    {
        if (j.contains("tx_grid"))
            cfg.tx = {j.at("tx_grid").at(0).get<int>(), j.at("tx_grid").at(1).get<int>()};
        if (j.contains("rx_grid"))
            cfg.rx = {j.at("rx_grid").at(0).get<int>(), j.at("rx_grid").at(1).get<int>()};
        cfg.n_rf = j.value("n_rf", cfg.n_rf);
        cfg.n_streams = j.value("n_streams", cfg.n_streams);
        cfg.n_subcarriers = j.value("n_subcarriers", cfg.n_subcarriers);
        cfg.carrier_hz = j.value("carrier_hz", cfg.carrier_hz);
        cfg.bandwidth_hz = j.value("bandwidth_hz", cfg.bandwidth_hz);
        if (j.contains("element_spacing_m"))
            cfg.element_spacing_m = j.at("element_spacing_m").get<double>();
        cfg.n_clusters = j.value("n_clusters", cfg.n_clusters);
        cfg.n_rays = j.value("n_rays", cfg.n_rays);
        cfg.angular_spread_rad = j.value("angular_spread_rad", cfg.angular_spread_rad);
        if (j.contains("angular_spread_deg"))
            cfg.angular_spread_rad = j.at("angular_spread_deg").get<double>() * kPi / 180.0;
        if (j.contains("cluster_power"))
            cfg.cluster_power = j.at("cluster_power").get<std::vector<double>>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("system config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void dataset_write(const std::filesystem::path &path, const ChannelDataset &ds)
{
    const auto &cfg = ds.config;
    const std::size_t n_rays = static_cast<std::size_t>(cfg.n_clusters * cfg.n_rays);
    for (const auto &s : ds.samples)
    {
        if (s.rays.size() != n_rays || s.subcarriers() != cfg.n_subcarriers)
            throw DimensionError("dataset_write: sample does not match the dataset config");
        for (const auto &hk : s.h)
            if (hk.rows() != cfg.n_rx() || hk.cols() != cfg.n_tx())
                throw DimensionError("dataset_write: channel matrix does not match the dataset config");
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");

    nlohmann::json header;
    header["config"] = to_json(cfg);
    header["samples"] = ds.samples.size();
    header["endianness"] = "LE";
    io::write_header(os, kMagic, kVersion, header.dump());

    for (const auto &s : ds.samples)
    {
        for (const Ray &r : s.rays)
        {
            io::write_le(os, r.aod_azimuth);
            io::write_le(os, r.aod_elevation);
            io::write_le(os, r.aoa_azimuth);
            io::write_le(os, r.aoa_elevation);
            io::write_le(os, r.gain.real());
            io::write_le(os, r.gain.imag());
        }
        for (const auto &hk : s.h)
            for (Eigen::Index r = 0; r < hk.rows(); ++r)
                for (Eigen::Index c = 0; c < hk.cols(); ++c)
                {
                    io::write_le(os, hk(r, c).real());
                    io::write_le(os, hk(r, c).imag());
                }
    }
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

ChannelDataset dataset_read(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());

    const std::string text = io::read_header(is, kMagic, kVersion);
    nlohmann::json header;
    try
    {
        header = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw FormatError(std::string("dataset header: ") + e.what());
    }
    if (header.value("endianness", std::string{}) != "LE")
        throw FormatError("dataset header: unsupported endianness tag");

    ChannelDataset ds;
    std::size_t count = 0;
    try
    {
        ds.config = system_config_from_json(header.at("config"));
        count = header.at("samples").get<std::size_t>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw FormatError(std::string("dataset header: ") + e.what());
    }
    catch (const ConfigError &e)
    {
        throw FormatError(std::string("dataset header: ") + e.what());
    }

    const auto &cfg = ds.config;
    const int n_rays = cfg.n_clusters * cfg.n_rays;
    ds.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        ChannelRealization s;
        s.rays.resize(static_cast<std::size_t>(n_rays));
        for (int r = 0; r < n_rays; ++r)
        {
            Ray &ray = s.rays[static_cast<std::size_t>(r)];
            ray.cluster = r / cfg.n_rays;
            ray.aod_azimuth = io::read_le<double>(is, "ray block");
            ray.aod_elevation = io::read_le<double>(is, "ray block");
            ray.aoa_azimuth = io::read_le<double>(is, "ray block");
            ray.aoa_elevation = io::read_le<double>(is, "ray block");
            const double re = io::read_le<double>(is, "ray block");
            const double im = io::read_le<double>(is, "ray block");
            ray.gain = Complex(re, im);
        }
        s.h.assign(static_cast<std::size_t>(cfg.n_subcarriers), ComplexMatrix(cfg.n_rx(), cfg.n_tx()));
        for (auto &hk : s.h)
            for (Eigen::Index r = 0; r < hk.rows(); ++r)
                for (Eigen::Index c = 0; c < hk.cols(); ++c)
                {
                    const double re = io::read_le<double>(is, "channel tensor");
                    const double im = io::read_le<double>(is, "channel tensor");
                    hk(r, c) = Complex(re, im);
                }
        ds.samples.push_back(std::move(s));
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after the declared samples");
    return ds;
}

} // namespace hbf
