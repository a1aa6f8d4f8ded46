#pragma once

#include <cstddef>
#include <vector>

namespace invc {

// Linear-phase anti-alias FIR shared by decimate and upsample: a
// Blackman-windowed sinc, unity DC gain, odd length so the group delay is
// the integer (taps-1)/2 and alignment stays a plain index shift.
struct FirKernel {
    std::vector<double> taps;
    std::size_t delay() const { return (taps.size() - 1) / 2; }
};

FirKernel windowed_sinc_lowpass(std::size_t tap_count, double cutoff_hz, double sample_rate);

// Magnitude response at one frequency, by direct evaluation of the tap sum.
double fir_magnitude(const FirKernel& kernel, double freq_hz, double sample_rate);

// The anti-alias kernel used for the 44100 <-> 2756.25 Hz conversions.
const FirKernel& decimation_kernel();

// Low-pass then keep every 16th sample, group delay compensated. Output
// length floor(n/16). Throws TooShort when the input is shorter than the
// filter.
std::vector<double> decimate(const std::vector<double>& input, int factor);

// Zero-stuff by 16, same low-pass scaled by 16. Output length 16 * n.
// Throws EmptyInput.
std::vector<double> upsample(const std::vector<double>& input, int factor);

} // namespace invc
