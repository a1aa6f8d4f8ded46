#pragma once

#include "invc/signal.hpp"

#include <cstdint>
#include <string>

namespace invc {

struct GestureSpec {
    double duration = 360.0; // s, > 0; default mirrors a six-minute corpus
    std::uint64_t seed = 0;
    double smoothness_cutoff = 8.0; // Hz
};

// Seeded white noise, low-passed to below the smoothness cutoff, rescaled so
// the 99th percentile of |x| fills the +-0.05 m range, then clamped. Pure
// function of the spec.
GestureSignal random_gesture(const GestureSpec& spec);

// Mono 44100 Hz WAV; full scale +-1.0 maps linearly to +-0.05 m. Throws
// BadWav naming the failed requirement.
GestureSignal import_gesture(const std::string& wav_path);

} // namespace invc
