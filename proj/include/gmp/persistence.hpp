// Copyright 2026 The GMP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GMP_PERSISTENCE_HPP_
#define GMP_PERSISTENCE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gmp/scoring.hpp"
#include "gmp/vocab.hpp"

namespace gmp {

// Container layout (little-endian): magic "GMPC", u32 version, u64 header
// length, a JSON header, then the f64 payload. The header lists every
// payload array by name, offset and count and carries the SHA-256 of the
// payload bytes.
inline constexpr std::uint32_t kContainerVersion = 1;

std::vector<std::uint8_t> encode_model(const BilinearModel& model);
BilinearModel decode_model(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_vocabulary(const Vocabulary& vocab);
Vocabulary decode_vocabulary(std::span<const std::uint8_t> bytes);

// Payload digest recorded in a container.
std::string container_digest(std::span<const std::uint8_t> bytes);

// File wrappers; save returns the payload digest.
std::string save_model(const std::filesystem::path& path,
                       const BilinearModel& model);
BilinearModel load_model(const std::filesystem::path& path);
std::string save_vocabulary(const std::filesystem::path& path,
                            const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace gmp

#endif  // GMP_PERSISTENCE_HPP_
