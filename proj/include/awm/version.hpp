// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace awm {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kSchemaVersion = "1";

}  // namespace awm
