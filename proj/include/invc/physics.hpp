#pragma once

#include "invc/signal.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace invc {

// Mass-interaction sound synthesis at 44100 Hz. A ModelGraph is a fixed set
// of elements (point masses, modal resonators) excited through nonlinear
// links by a one-dimensional gesture position signal. Integration schemes:
//   point mass      x[n+1] = 2 x[n] - x[n-1] + (T^2/m) F[n]
//   modal filter    y[n+1] = 2 r cos(th) y[n] - r^2 y[n-1] + T^2 F[n]
// with r = exp(-ln(1000) / (t60 * fs)) and th = 2 pi f / fs, so an impulse
// envelope falls exactly 60 dB after t60 seconds.

struct PointMass {
    double mass = 1.0; // kg, > 0
    double position = 0.0;
    double previous_position = 0.0;
    double force = 0.0; // accumulator, cleared every step
};

struct Mode {
    double frequency = 440.0; // Hz, (0, 22050)
    double t60 = 1.0;         // s, time to decay 60 dB
    double gain = 1.0;
    // filter state: displacement at n and n-1
    double state = 0.0;
    double previous_state = 0.0;
    // two-pole coefficients, derived from frequency/t60 on first step
    double a1 = 0.0;
    double a2 = 0.0;
};

struct ModalResonator {
    std::vector<Mode> modes;
    double force = 0.0; // accumulator, cleared every step

    // gain-weighted sum of mode states, recomputed after each advance
    double contact_position = 0.0;
};

// Which simulation object a link endpoint names.
struct EndpointRef {
    enum class Kind { Ground, Gesture, Mass, Resonator };
    Kind kind = Kind::Ground;
    std::size_t index = 0;

    static EndpointRef ground() { return {Kind::Ground, 0}; }
    static EndpointRef gesture() { return {Kind::Gesture, 0}; }
    static EndpointRef mass(std::size_t i) { return {Kind::Mass, i}; }
    static EndpointRef resonator(std::size_t i) { return {Kind::Resonator, i}; }
};

// Linear spring-damper between two endpoints (rest length zero in
// displacement coordinates).
struct SpringLink {
    double stiffness = 0.0; // N/m
    double damping = 0.0;   // N*s/m
    EndpointRef a, b;
};

// Plectrum. Delta = (gesture - attach_offset) - contact_position. While
// armed and |Delta| < d the plectrum drags the resonator with force
// stiffness * Delta; leaving the window on the side opposite the previous
// pluck releases it (a pluck), leaving on the same side slips back silently.
// Re-arms once Delta changes sign relative to the last pluck, which is what
// makes the threshold d effectively change sign with each pluck.
struct PluckLink {
    double stiffness = 2000.0; // N/m
    double threshold = 0.005;  // d, m, > 0
    double attach_offset = 0.0;
    EndpointRef target;

    // state
    bool armed = true;
    bool engaged = false;
    int last_sign = -1; // +1 or -1
    bool has_plucked = false;
};

// Unilateral penalty contact. Penetration p = (gesture - contact_offset) -
// contact_position; while p > 0 the link presses the target along the
// penetration direction with stiffness * p + damping * dp/dt, otherwise the
// force is exactly zero.
struct TouchLink {
    double stiffness = 3000.0; // N/m
    double damping = 2.0;      // N*s/m
    double contact_offset = 0.0;
    EndpointRef target;

    // state
    double previous_penetration = 0.0;
    bool have_previous = false;
    double last_force = 0.0; // per-sample diagnostics for the contact tests
    double last_penetration = 0.0;
};

// Bow. mu(v) = peak_force * (v/v0) * exp(0.5 - 0.5 (v/v0)^2) of the relative
// velocity (gesture minus target), odd in v with |mu| <= peak_force and a
// falling branch beyond v0 that produces stick-slip.
struct FrictionLink {
    double peak_force = 0.5; // N
    double v0 = 0.05;        // m/s
    EndpointRef target;

    // state
    double previous_gesture = 0.0;
    bool have_previous = false;
};

// Friction curve alone, exposed for the odd-symmetry/bound properties.
double friction_force(double relative_velocity, double peak_force, double v0);

struct PluckEvent {
    std::size_t sample = 0; // index within the current render/step stream
    std::size_t link = 0;   // which pluck link fired
    int sign = 0;           // sign of Delta at release
};

enum class ModelPreset {
    PluckAResonator,
    TouchSeveralModalResn,
    ScratchMassLinkChain,
    PluckHarp10,
};

// Exact, case-sensitive preset names. Throws IndexOutOfRange on unknown name.
ModelPreset preset_from_name(const std::string& name);
const char* preset_name(ModelPreset preset);

class ModelGraph {
public:
    std::vector<PointMass> masses;
    std::vector<ModalResonator> resonators;
    std::vector<SpringLink> springs;
    std::vector<PluckLink> plucks;
    std::vector<TouchLink> touches;
    std::vector<FrictionLink> frictions;
    std::vector<EndpointRef> listening_points;
    double output_gain = 1.0;
    double sample_rate = kAudioRate;

    // Advances every element by one sample period and returns
    // output_gain * (sum of listening point displacements). The gesture
    // sample is clamped to +-0.05 m at this boundary.
    double step(double gesture_sample);

    // Zeroes all element states, link arming states and filter memories.
    void reset();

    double endpoint_position(const EndpointRef& ref, double gesture) const;

    const std::vector<PluckEvent>& pluck_events() const { return events_; }
    std::size_t steps_taken() const { return steps_; }

private:
    void apply_force(const EndpointRef& ref, double f);
    void prepare();

    std::vector<PluckEvent> events_;
    std::size_t steps_ = 0;
    bool prepared_ = false;
};

// Deterministic, fully parameterized graph for the named preset.
ModelGraph build_preset(ModelPreset preset);

// Runs the graph over the whole gesture. Output length equals gesture
// length; bit-identical for identical inputs. Throws EmptyInput.
AudioSignal render(ModelGraph& graph, const GestureSignal& gesture);

} // namespace invc
