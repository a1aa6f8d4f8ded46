#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace invc {

inline constexpr double kAudioRate = 44100.0;
inline constexpr int kDecimationFactor = 16;
inline constexpr double kDecimatedRate = kAudioRate / kDecimationFactor; // 2756.25 Hz
inline constexpr double kGestureRange = 0.05;                            // m, gestures live in +-range

// Synthesized sound, dimensionless amplitude (nominally within [-1, 1]).
struct AudioSignal {
    std::vector<double> samples;
    double sample_rate = kAudioRate;
};

// Hand position over time in meters, within [-kGestureRange, +kGestureRange].
struct GestureSignal {
    std::vector<double> samples;
    double sample_rate = kAudioRate;
};

inline double clamp_gesture(double x) {
    if (x > kGestureRange) return kGestureRange;
    if (x < -kGestureRange) return -kGestureRange;
    return x;
}

inline double peak_abs(const std::vector<double>& v) {
    double p = 0.0;
    for (double x : v) p = std::max(p, std::abs(x));
    return p;
}

inline double rms(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

inline double rms(const std::vector<double>& v) { return rms(v.data(), v.size()); }

inline double db(double amplitude_ratio) { return 20.0 * std::log10(amplitude_ratio); }

} // namespace invc
