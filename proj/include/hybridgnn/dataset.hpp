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

#include "hybridgnn/channel.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hbf
{

struct ChannelDataset
{
    SystemConfig config;
    std::vector<ChannelRealization> samples;
};

// Sample i is drawn from derive_rng(seed, i).
ChannelDataset generate_dataset(const SystemConfig &cfg, std::size_t count, std::uint64_t seed);

// Binary layout (all integers and floats little-endian):
//   "SQCH" | u32 version = 1 | u64 header length | JSON header
//   per sample: N_cl*N_ray rays x 6 f64 (aod az, aod el, aoa az, aoa el, gain re, gain im)
//               H as K x N_r x N_t complex, interleaved re/im, subcarrier-major, row-major
// The JSON header carries the config, the sample count and "endianness": "LE".
void dataset_write(const std::filesystem::path &path, const ChannelDataset &ds);
// Throws FormatError on bad magic, unsupported version, truncation or
// dimension inconsistency.
ChannelDataset dataset_read(const std::filesystem::path &path);

nlohmann::json to_json(const SystemConfig &cfg);
// Missing keys keep the defaults of SystemConfig{}. Validates the result.
SystemConfig system_config_from_json(const nlohmann::json &j);

} // namespace hbf
