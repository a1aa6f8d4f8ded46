#include "invc/gestures.hpp"

#include "invc/errors.hpp"
#include "invc/rng.hpp"
#include "invc/wav.hpp"

#include <algorithm>
#include <cmath>

namespace invc {

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;

    double operator()(double x) {
        const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x;
        y2 = y1;
        y1 = y;
        return y;
    }
};

Biquad butterworth_lowpass_section(double cutoff_hz, double sample_rate, double q) {
    const double k = std::tan(M_PI * cutoff_hz / sample_rate);
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Biquad s{};
    s.b0 = k * k * norm;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    return s;
}

} // namespace

GestureSignal random_gesture(const GestureSpec& spec) {
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * kAudioRate));

    SplitMix64 rng(spec.seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.next_uniform(-1.0, 1.0);

    // 4th-order Butterworth, designed at 0.45x the nominal cutoff so that
    // after the 24 dB/oct rolloff at least 99% of the spectral energy sits
    // below the nominal cutoff itself.
    const double fc = 0.45 * spec.smoothness_cutoff;
    Biquad s1 = butterworth_lowpass_section(fc, kAudioRate, 1.0 / (2.0 * std::cos(M_PI / 8.0)));
    Biquad s2 = butterworth_lowpass_section(fc, kAudioRate, 1.0 / (2.0 * std::cos(3.0 * M_PI / 8.0)));
    for (auto& v : x) v = s2(s1(v));

    // rescale so the 99th percentile of |x| lands on the range limit
    std::vector<double> mag(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mag[i] = std::abs(x[i]);
    std::sort(mag.begin(), mag.end());
    const double p99 = mag.empty() ? 0.0 : mag[static_cast<std::size_t>(
                                               std::llround(0.99 * double(mag.size() - 1)))];
    const double scale = p99 > 0.0 ? kGestureRange / p99 : 0.0;

    GestureSignal g;
    g.sample_rate = kAudioRate;
    g.samples.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g.samples[i] = clamp_gesture(x[i] * scale);
    return g;
}

GestureSignal import_gesture(const std::string& wav_path) {
    WavData w = read_wav(wav_path);
    if (w.channels != 1)
        throw BadWav("gesture WAV must be mono, got " + std::to_string(w.channels) + " channels");
    if (w.sample_rate != static_cast<int>(kAudioRate))
        throw BadWav("gesture WAV must be 44100 Hz, got " + std::to_string(w.sample_rate));

    GestureSignal g;
    g.sample_rate = kAudioRate;
    g.samples.resize(w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        g.samples[i] = clamp_gesture(w.samples[i] * kGestureRange);
    return g;
}

} // namespace invc
