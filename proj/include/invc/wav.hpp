#pragma once

#include <string>
#include <vector>

namespace invc {

// Decoded WAV contents. Samples are interleaved, scaled to [-1, 1].
struct WavData {
    std::vector<double> samples; // interleaved when channels > 1
    int channels = 1;
    int sample_rate = 0;

    std::size_t frames() const { return channels ? samples.size() / channels : 0; }
};

// Reads RIFF/WAVE, PCM 16-bit or IEEE float 32-bit. Throws BadWav with a
// message naming the offending field.
WavData read_wav(const std::string& path);

// Writes 16-bit PCM. `channels` interleaved streams, hard-clipped at +-1.0.
void write_wav(const std::string& path, const std::vector<double>& interleaved,
               int channels, int sample_rate);

} // namespace invc
