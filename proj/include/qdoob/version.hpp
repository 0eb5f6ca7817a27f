// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace qdoob {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qdoob
