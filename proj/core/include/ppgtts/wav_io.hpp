// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "ppgtts/dsp.hpp"

namespace ppgtts {

struct WavWriteResult {
    size_t bytes = 0;
    size_t clipped = 0;  // samples outside [-1, 1] clamped before quantization
};

// PCM16 mono RIFF/WAVE, 44-byte canonical header. Samples are clipped to
// [-1, 1] and scaled by 32767.
WavWriteResult write_wav(const Waveform& wave, const std::string& path);

// Reads the PCM16 mono files write_wav produces.
Waveform read_wav(const std::string& path);

}  // namespace ppgtts
