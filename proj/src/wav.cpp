#include "invc/wav.hpp"

#include "invc/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace invc {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

WavData read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadWav("cannot open WAV file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw BadWav("not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t chunk_len = read_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size()) throw BadWav("truncated chunk in WAV file");
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw BadWav("fmt chunk too small");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1); // chunks are word-aligned
    }

    if (!have_fmt) throw BadWav("missing fmt chunk");
    if (!data) throw BadWav("missing data chunk");
    if (format != 1 && format != 3)
        throw BadWav("unsupported WAV format tag " + std::to_string(format) +
                     " (need PCM=1 or IEEE float=3)");
    if (format == 1 && bits != 16)
        throw BadWav("unsupported PCM bit depth " + std::to_string(bits) + " (need 16)");
    if (format == 3 && bits != 32)
        throw BadWav("unsupported float bit depth " + std::to_string(bits) + " (need 32)");
    if (channels == 0) throw BadWav("zero channels");

    WavData out;
    out.channels = channels;
    out.sample_rate = static_cast<int>(rate);

    const std::size_t bytes_per = bits / 8u;
    const std::size_t count = data_len / bytes_per;
    out.samples.resize(count);
    if (format == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            std::int16_t s = static_cast<std::int16_t>(read_u16(data + i * 2));
            out.samples[i] = static_cast<double>(s) / 32768.0;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t u = read_u32(data + i * 4);
            float f;
            std::memcpy(&f, &u, 4);
            out.samples[i] = static_cast<double>(f);
        }
    }
    return out;
}

void write_wav(const std::string& path, const std::vector<double>& interleaved,
               int channels, int sample_rate) {
    if (channels <= 0) throw IoError("write_wav: channels must be positive");
    const std::uint32_t data_len = static_cast<std::uint32_t>(interleaved.size() * 2);
    const std::uint16_t block_align = static_cast<std::uint16_t>(channels * 2);

    std::string out;
    out.reserve(44 + data_len);
    out += "RIFF";
    put_u32(out, 36 + data_len);
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, static_cast<std::uint16_t>(channels));
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
    put_u16(out, block_align);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_len);

    for (double x : interleaved) {
        if (x > 1.0) x = 1.0;
        if (x < -1.0) x = -1.0;
        auto s = static_cast<std::int16_t>(std::lrint(x * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(s));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write: " + path);
}

} // namespace invc
