#include "tapnet/wav.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "tapnet/serial.hpp"

namespace tapnet {

void Recording::validate() const {
    if (sample_rate <= 0.0) throw spec_error("sample rate must be positive");
    for (float v : samples) {
        if (!std::isfinite(v)) throw spec_error("recording contains non-finite sample");
    }
}

namespace {

struct WavFormat {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

float decode_sample(const unsigned char* p, const WavFormat& fmt) {
    switch (fmt.bits) {
        case 16: {
            const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            return static_cast<float>(v) / 32768.0f;
        }
        case 24: {
            std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
            if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
            return static_cast<float>(v) / 8388608.0f;
        }
        case 32: {
            float v;
            std::memcpy(&v, p, 4);
            return v;
        }
        default:
            throw format_error("unsupported WAV bit depth " + std::to_string(fmt.bits));
    }
}

} // namespace

Recording read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open WAV file: " + path);

    char riff[4];
    in.read(riff, 4);
    if (!in || std::memcmp(riff, "RIFF", 4) != 0) throw format_error("not a RIFF file: " + path);
    serial::read_le<std::uint32_t>(in, "RIFF size");
    char wave[4];
    in.read(wave, 4);
    if (!in || std::memcmp(wave, "WAVE", 4) != 0) throw format_error("not a WAVE file: " + path);

    WavFormat fmt;
    bool have_fmt = false;
    std::vector<unsigned char> payload;
    while (in) {
        char id[4];
        in.read(id, 4);
        if (!in) break;
        const auto size = serial::read_le<std::uint32_t>(in, "chunk size");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            fmt.format = serial::read_le<std::uint16_t>(in, "format");
            fmt.channels = serial::read_le<std::uint16_t>(in, "channels");
            fmt.sample_rate = serial::read_le<std::uint32_t>(in, "sample rate");
            serial::read_le<std::uint32_t>(in, "byte rate");
            serial::read_le<std::uint16_t>(in, "block align");
            fmt.bits = serial::read_le<std::uint16_t>(in, "bit depth");
            if (size > 16) in.seekg(size - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            payload.resize(size);
            in.read(reinterpret_cast<char*>(payload.data()), size);
            if (!in) throw format_error("truncated WAV data chunk: " + path);
        } else {
            in.seekg(size + (size & 1), std::ios::cur);
        }
    }
    if (!have_fmt) throw format_error("WAV file has no fmt chunk: " + path);
    if (payload.empty()) throw format_error("WAV file has no data chunk: " + path);
    if (fmt.format != 1 && fmt.format != 3) {
        throw format_error("unsupported WAV format code " + std::to_string(fmt.format) +
                           " (PCM and IEEE float supported)");
    }
    if (fmt.format == 3 && fmt.bits != 32) throw format_error("float WAV must be 32-bit");
    if (fmt.channels == 0) throw format_error("WAV channel count is zero");

    const std::size_t bytes_per_sample = fmt.bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
    const std::size_t frames = payload.size() / frame_bytes;

    Recording rec;
    rec.sample_rate = static_cast<double>(fmt.sample_rate);
    rec.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        float acc = 0.0f;
        for (std::uint16_t c = 0; c < fmt.channels; ++c) {
            acc += decode_sample(payload.data() + f * frame_bytes + c * bytes_per_sample, fmt);
        }
        rec.samples[f] = acc / static_cast<float>(fmt.channels);
    }
    rec.validate();
    return rec;
}

Recording read_raw_f32(const std::string& path, double sample_rate) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open raw file: " + path);
    const auto size = std::filesystem::file_size(path);
    if (size % 4 != 0) throw format_error("raw float32 file size not divisible by 4: " + path);
    Recording rec;
    rec.sample_rate = sample_rate;
    rec.samples.resize(size / 4);
    serial::read_f32_array(in, rec.samples.data(), rec.samples.size(), "raw samples");
    rec.validate();
    return rec;
}

namespace {
void write_wav_header(std::ostream& out, std::uint16_t format, std::uint16_t bits,
                      std::uint32_t rate, std::uint32_t data_bytes) {
    out.write("RIFF", 4);
    serial::write_le<std::uint32_t>(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    serial::write_le<std::uint32_t>(out, 16);
    serial::write_le<std::uint16_t>(out, format);
    serial::write_le<std::uint16_t>(out, 1);  // mono
    serial::write_le<std::uint32_t>(out, rate);
    serial::write_le<std::uint32_t>(out, rate * bits / 8);
    serial::write_le<std::uint16_t>(out, bits / 8);
    serial::write_le<std::uint16_t>(out, bits);
    out.write("data", 4);
    serial::write_le<std::uint32_t>(out, data_bytes);
}
} // namespace

void write_wav_pcm16(const Recording& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open WAV for writing: " + path);
    write_wav_header(out, 1, 16, static_cast<std::uint32_t>(rec.sample_rate),
                     static_cast<std::uint32_t>(rec.samples.size() * 2));
    for (float v : rec.samples) {
        const float clamped = std::max(-1.0f, std::min(1.0f, v));
        serial::write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lrint(clamped * 32767.0f)));
    }
}

void write_wav_f32(const Recording& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open WAV for writing: " + path);
    write_wav_header(out, 3, 32, static_cast<std::uint32_t>(rec.sample_rate),
                     static_cast<std::uint32_t>(rec.samples.size() * 4));
    serial::write_f32_array(out, rec.samples.data(), rec.samples.size());
}

void write_raw_f32(const Recording& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open raw file for writing: " + path);
    serial::write_f32_array(out, rec.samples.data(), rec.samples.size());
}

} // namespace tapnet
