#pragma once

#include <string>
#include <vector>

#include "tapnet/common.hpp"

namespace tapnet {

// A raw mono waveform as acquired (before windowing into signals).
struct Recording {
    std::vector<float> samples;
    double sample_rate = 48000.0;

    void validate() const;
};

// PCM WAV reader: 16-bit, 24-bit, and IEEE float32; multi-channel input is
// averaged to mono.
Recording read_wav(const std::string& path);

// Headerless float32 little-endian stream; the caller supplies the rate.
Recording read_raw_f32(const std::string& path, double sample_rate);

// Writers used by tests and fixtures.
void write_wav_pcm16(const Recording& rec, const std::string& path);
void write_wav_f32(const Recording& rec, const std::string& path);
void write_raw_f32(const Recording& rec, const std::string& path);

} // namespace tapnet
