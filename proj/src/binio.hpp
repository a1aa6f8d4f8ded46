#pragma once

// Little-endian encode/decode helpers shared by the dataset and checkpoint
// file formats.

#include "invc/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace invc::detail {

template <typename T>
void put_le(std::string& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_le(out, u);
}

inline void put_f64(std::string& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    put_le(out, u);
}

class Reader {
public:
    Reader(const std::string& path, std::string what)
        : in_(path, std::ios::binary), what_(std::move(what)) {
        if (!in_) throw IoError("cannot open " + what_ + ": " + path);
    }

    void bytes(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            throw TruncatedFile(what_ + " truncated");
    }

    template <typename T>
    T le() {
        unsigned char buf[sizeof(T)];
        bytes(buf, sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return static_cast<T>(v);
    }

    float f32() {
        auto u = le<std::uint32_t>();
        float f;
        std::memcpy(&f, &u, 4);
        return f;
    }

    double f64() {
        auto u = le<std::uint64_t>();
        double f;
        std::memcpy(&f, &u, 8);
        return f;
    }

private:
    std::ifstream in_;
    std::string what_;
};

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw IoError("short write: " + path);
}

} // namespace invc::detail
