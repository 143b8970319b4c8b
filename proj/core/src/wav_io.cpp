// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ppgtts/wav_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ppgtts {

namespace {

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const std::string& buf, size_t pos) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
    return v;
}

uint16_t get_u16(const std::string& buf, size_t pos) {
    return static_cast<uint16_t>(static_cast<uint8_t>(buf[pos]) |
                                 (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1])) << 8));
}

}  // namespace

WavWriteResult write_wav(const Waveform& wave, const std::string& path) {
    for (float s : wave.samples) {
        if (!std::isfinite(s)) throw std::invalid_argument("write_wav: non-finite sample");
    }
    const uint32_t data_size = static_cast<uint32_t>(wave.samples.size() * 2);
    const uint32_t byte_rate = static_cast<uint32_t>(wave.sample_rate) * 2;

    std::string out;
    out.reserve(44 + data_size);
    out += "RIFF";
    put_u32(out, 36 + data_size);
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<uint32_t>(wave.sample_rate));
    put_u32(out, byte_rate);
    put_u16(out, 2);   // block align
    put_u16(out, 16);  // bits per sample
    out += "data";
    put_u32(out, data_size);

    WavWriteResult result;
    for (float s : wave.samples) {
        float c = s;
        if (c > 1.0f) {
            c = 1.0f;
            ++result.clipped;
        } else if (c < -1.0f) {
            c = -1.0f;
            ++result.clipped;
        }
        const int16_t pcm = static_cast<int16_t>(std::lrintf(c * 32767.0f));
        put_u16(out, static_cast<uint16_t>(pcm));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("short write: " + path);
    result.bytes = out.size();
    return result;
}

Waveform read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open wav file: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 44 || buf.substr(0, 4) != "RIFF" || buf.substr(8, 4) != "WAVE") {
        throw std::runtime_error("wav file: bad RIFF header");
    }

    // walk chunks: fmt then data
    size_t pos = 12;
    int sample_rate = 0;
    uint16_t channels = 0, bits = 0, format = 0;
    std::string data;
    while (pos + 8 <= buf.size()) {
        const std::string id = buf.substr(pos, 4);
        const uint32_t size = get_u32(buf, pos + 4);
        pos += 8;
        if (pos + size > buf.size()) throw std::runtime_error("wav file: truncated chunk");
        if (id == "fmt ") {
            if (size < 16) throw std::runtime_error("wav file: bad fmt chunk");
            format = get_u16(buf, pos);
            channels = get_u16(buf, pos + 2);
            sample_rate = static_cast<int>(get_u32(buf, pos + 4));
            bits = get_u16(buf, pos + 14);
        } else if (id == "data") {
            data = buf.substr(pos, size);
        }
        pos += size + (size % 2);
    }
    if (format != 1 || channels != 1 || bits != 16) {
        throw std::runtime_error("wav file: only PCM16 mono is supported");
    }
    if (sample_rate <= 0 || data.empty()) throw std::runtime_error("wav file: missing data");

    Waveform wave;
    wave.sample_rate = sample_rate;
    wave.samples.resize(data.size() / 2);
    for (size_t i = 0; i < wave.samples.size(); ++i) {
        const int16_t pcm = static_cast<int16_t>(get_u16(data, 2 * i));
        wave.samples[i] = static_cast<float>(pcm) / 32767.0f;
    }
    return wave;
}

}  // namespace ppgtts
