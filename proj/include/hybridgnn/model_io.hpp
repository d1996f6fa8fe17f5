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

#include "hybridgnn/gnn.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>

namespace hbf
{

// Binary layout (little-endian):
//   "SQNN" | u32 version = 1 | u64 header length | JSON header
//   weights as f64, GnnModel::parameters() order, each matrix column-major
// The header records dims, layer count, per-network widths, the activation
// tag and free-form training metadata.
void model_save(const std::filesystem::path &path, const GnnModel &model, const nlohmann::json &metadata = {});

// Throws FormatError on a malformed file, and ConfigError when `expected`
// is given and the stored (N_t, N_r, N_RF, N_s) differ.
GnnModel model_load(const std::filesystem::path &path, std::optional<GnnDims> expected = std::nullopt);

// Header of a model file, without reading the weights.
nlohmann::json model_header(const std::filesystem::path &path);

} // namespace hbf
