#include "invc/resample.hpp"

#include "invc/errors.hpp"
#include "invc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace invc {

namespace {

// 511 taps at cutoff 0.40 x 2756.25 Hz keeps the stopband under -40 dB
// everywhere above the decimated Nyquist (1378.125 Hz) while the passband
// stays flat through the audible fundamentals.
constexpr std::size_t kDecimTaps = 511;
constexpr double kDecimCutoffHz = 0.40 * kDecimatedRate;

} // namespace

FirKernel windowed_sinc_lowpass(std::size_t tap_count, double cutoff_hz, double sample_rate) {
    const double fc = cutoff_hz / sample_rate; // cycles per sample
    const auto m = static_cast<double>(tap_count - 1);
    FirKernel k;
    k.taps.resize(tap_count);
    double sum = 0.0;
    for (std::size_t i = 0; i < tap_count; ++i) {
        const double t = static_cast<double>(i) - m / 2.0;
        const double window = 0.42 - 0.5 * std::cos(2.0 * M_PI * i / m) +
                              0.08 * std::cos(4.0 * M_PI * i / m);
        const double sinc = (t == 0.0) ? 2.0 * fc : std::sin(2.0 * M_PI * fc * t) / (M_PI * t);
        k.taps[i] = window * sinc;
        sum += k.taps[i];
    }
    for (auto& tap : k.taps) tap /= sum; // exact unity DC gain
    return k;
}

double fir_magnitude(const FirKernel& kernel, double freq_hz, double sample_rate) {
    const double w = 2.0 * M_PI * freq_hz / sample_rate;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < kernel.taps.size(); ++i) {
        re += kernel.taps[i] * std::cos(w * static_cast<double>(i));
        im -= kernel.taps[i] * std::sin(w * static_cast<double>(i));
    }
    return std::hypot(re, im);
}

const FirKernel& decimation_kernel() {
    static const FirKernel kernel = windowed_sinc_lowpass(kDecimTaps, kDecimCutoffHz, kAudioRate);
    return kernel;
}

std::vector<double> decimate(const std::vector<double>& input, int factor) {
    if (factor != kDecimationFactor)
        throw TooShort("decimate: only factor 16 is supported, got " + std::to_string(factor));
    const FirKernel& k = decimation_kernel();
    if (input.size() < k.taps.size())
        throw TooShort("decimate: input length " + std::to_string(input.size()) +
                       " is shorter than the anti-alias filter (" +
                       std::to_string(k.taps.size()) + " taps)");

    const std::size_t out_len = input.size() / static_cast<std::size_t>(factor);
    const auto n = static_cast<std::ptrdiff_t>(input.size());
    const auto taps = static_cast<std::ptrdiff_t>(k.taps.size());
    const auto delay = static_cast<std::ptrdiff_t>(k.delay());

    std::vector<double> out(out_len);
    for (std::size_t kk = 0; kk < out_len; ++kk) {
        const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(kk) * factor + delay;
        // x is zero outside [0, n)
        const std::ptrdiff_t t_lo = std::max<std::ptrdiff_t>(0, center - n + 1);
        const std::ptrdiff_t t_hi = std::min<std::ptrdiff_t>(taps, center + 1);
        double acc = 0.0;
        for (std::ptrdiff_t t = t_lo; t < t_hi; ++t)
            acc += k.taps[static_cast<std::size_t>(t)] * input[static_cast<std::size_t>(center - t)];
        out[kk] = acc;
    }
    return out;
}

std::vector<double> upsample(const std::vector<double>& input, int factor) {
    if (factor != kDecimationFactor)
        throw TooShort("upsample: only factor 16 is supported, got " + std::to_string(factor));
    if (input.empty()) throw EmptyInput("upsample: empty input");
    const FirKernel& k = decimation_kernel();

    const auto len = static_cast<std::ptrdiff_t>(input.size());
    const auto taps = static_cast<std::ptrdiff_t>(k.taps.size());
    const auto delay = static_cast<std::ptrdiff_t>(k.delay());
    const double gain = static_cast<double>(factor);

    const auto ceil_div = [](std::ptrdiff_t a, std::ptrdiff_t b) {
        return a >= 0 ? (a + b - 1) / b : -((-a) / b);
    };

    std::vector<double> out(input.size() * static_cast<std::size_t>(factor));
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(out.size()); ++n) {
        // contributions from input samples kk with tap index n + delay - 16*kk in [0, taps)
        const std::ptrdiff_t idx = n + delay;
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, ceil_div(idx - taps + 1, factor));
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(len, idx / factor + 1);
        double acc = 0.0;
        for (std::ptrdiff_t kk = k_lo; kk < k_hi; ++kk)
            acc += k.taps[static_cast<std::size_t>(idx - kk * factor)] * input[static_cast<std::size_t>(kk)];
        out[static_cast<std::size_t>(n)] = gain * acc;
    }
    return out;
}

} // namespace invc
