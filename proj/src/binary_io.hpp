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

// Little-endian primitives shared by the dataset and model formats.

#include "hybridgnn/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace hbf::io
{

template <typename T>
T to_little_endian(T v)
{
    if constexpr (std::endian::native == std::endian::big)
    {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

template <typename T>
void write_le(std::ostream &os, T v)
{
    v = to_little_endian(v);
    os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream &is, std::string_view what)
{
    T v{};
    is.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (is.gcount() != static_cast<std::streamsize>(sizeof(T)))
        throw FormatError("truncated payload while reading " + std::string(what));
    return to_little_endian(v);
}

inline void write_header(std::ostream &os, std::string_view magic, std::uint32_t version, const std::string &json)
{
    os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    write_le<std::uint32_t>(os, version);
    write_le<std::uint64_t>(os, json.size());
    os.write(json.data(), static_cast<std::streamsize>(json.size()));
}

// Returns the JSON header text after checking magic and version.
inline std::string read_header(std::istream &is, std::string_view magic, std::uint32_t version)
{
    std::string got(magic.size(), '\0');
    is.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (is.gcount() != static_cast<std::streamsize>(got.size()) || got != magic)
        throw FormatError("bad magic: expected \"" + std::string(magic) + "\"");
    const auto v = read_le<std::uint32_t>(is, "version");
    if (v != version)
        throw FormatError("unsupported version " + std::to_string(v));
    const auto len = read_le<std::uint64_t>(is, "header length");
    if (len > (1u << 26))
        throw FormatError("header length out of range");
    std::string json(len, '\0');
    is.read(json.data(), static_cast<std::streamsize>(len));
    if (is.gcount() != static_cast<std::streamsize>(len))
        throw FormatError("truncated payload while reading header");
    return json;
}

} // namespace hbf::io
