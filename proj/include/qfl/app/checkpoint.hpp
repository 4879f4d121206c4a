// Copyright 2026 The QFL-HEP Authors
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
/**
 * @file
 * Versioned binary model checkpoints and atomic file output.
 *
 * Layout (little-endian):
 *   8 bytes   magic "QFLCKPT1"
 *   u32       format version
 *   u32       model kind (0 qlstm, 1 lstm, 2 vqc)
 *   u64       config hash
 *   u64       header length, then that many bytes of JSON
 *   u64       parameter count, then that many IEEE-754 doubles
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/app/config.hpp"
#include "qfl/data.hpp"
#include "qfl/model.hpp"

namespace qfl::app {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    RunConfig config; ///< resolved
    std::vector<std::string> feature_names;
    Normalization normalization;
    std::string dataset_fingerprint;
    AnyModel model;
};

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);

/// Throws IoError if unreadable and FormatError on a bad magic, an
/// unsupported version, a hash mismatch or a truncated payload.
Checkpoint load_checkpoint(const std::filesystem::path &path);

/// Write to `path.tmp` and rename over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view bytes);

} // namespace qfl::app
