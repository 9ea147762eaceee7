#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "tapnet/common.hpp"

// Little-endian fixed-width primitives shared by the TAPW / TAPD file formats.

namespace tapnet::serial {

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
    if (!out) throw io_error("write failed");
}

template <typename T>
T read_le(std::istream& in, const char* what) {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw format_error(std::string("truncated file while reading ") + what);
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(buf[i]) << (8 * i);
    return static_cast<T>(u);
}

inline void write_f32(std::ostream& out, float value) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    write_le<std::uint32_t>(out, bits);
}

inline float read_f32(std::istream& in, const char* what) {
    const std::uint32_t bits = read_le<std::uint32_t>(in, what);
    float value;
    std::memcpy(&value, &bits, sizeof(value));
    return value;
}

inline void write_f32_array(std::ostream& out, const float* data, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) write_f32(out, data[i]);
}

inline void read_f32_array(std::istream& in, float* data, std::size_t count, const char* what) {
    for (std::size_t i = 0; i < count; ++i) data[i] = read_f32(in, what);
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw io_error("write failed");
}

inline std::string read_string(std::istream& in, const char* what) {
    const std::uint32_t len = read_le<std::uint32_t>(in, what);
    if (len > (1u << 20)) throw format_error(std::string("implausible string length in ") + what);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw format_error(std::string("truncated file while reading ") + what);
    return s;
}

inline void expect_magic(std::istream& in, const char magic[4], const char* format_name) {
    char buf[4];
    in.read(buf, 4);
    if (!in || std::memcmp(buf, magic, 4) != 0) {
        throw format_error(std::string("bad magic: not a ") + format_name + " file");
    }
}

} // namespace tapnet::serial
