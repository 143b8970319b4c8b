// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>

namespace ppgtts::macs {

// Thread-local multiply-accumulate counter. The convolution, matmul and
// attention kernels report their inner-product work here; the complexity
// analyzer is required to reproduce these counts exactly on micro configs.
inline thread_local uint64_t g_count = 0;

inline void reset() { g_count = 0; }
inline void add(uint64_t n) { g_count += n; }
inline uint64_t count() { return g_count; }

}  // namespace ppgtts::macs
