#include "invc/physics.hpp"

#include "invc/errors.hpp"

#include <cmath>

namespace invc {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Harmonic modal bank: partials k*f0 for k = 1..count. t60 and gain fall
// with the partial number so higher modes ring shorter and quieter.
ModalResonator harmonic_resonator(double f0, int count, double t60_base) {
    ModalResonator r;
    r.modes.reserve(static_cast<std::size_t>(count));
    for (int k = 1; k <= count; ++k) {
        Mode m;
        m.frequency = f0 * k;
        m.t60 = t60_base / (1.0 + 0.5 * (k - 1));
        m.gain = 1.0 / std::pow(2.0, k - 1);
        r.modes.push_back(m);
    }
    return r;
}

} // namespace

double friction_force(double relative_velocity, double peak_force, double v0) {
    const double u = relative_velocity / v0;
    return peak_force * u * std::exp(0.5 - 0.5 * u * u);
}

ModelPreset preset_from_name(const std::string& name) {
    if (name == "PluckAResonator") return ModelPreset::PluckAResonator;
    if (name == "TouchSeveralModalResn") return ModelPreset::TouchSeveralModalResn;
    if (name == "ScratchMassLinkChain") return ModelPreset::ScratchMassLinkChain;
    if (name == "PluckHarp10") return ModelPreset::PluckHarp10;
    throw IndexOutOfRange("unknown preset name: " + name);
}

const char* preset_name(ModelPreset preset) {
    switch (preset) {
    case ModelPreset::PluckAResonator: return "PluckAResonator";
    case ModelPreset::TouchSeveralModalResn: return "TouchSeveralModalResn";
    case ModelPreset::ScratchMassLinkChain: return "ScratchMassLinkChain";
    case ModelPreset::PluckHarp10: return "PluckHarp10";
    }
    return "?";
}

double ModelGraph::endpoint_position(const EndpointRef& ref, double gesture) const {
    switch (ref.kind) {
    case EndpointRef::Kind::Ground: return 0.0;
    case EndpointRef::Kind::Gesture: return gesture;
    case EndpointRef::Kind::Mass: return masses[ref.index].position;
    case EndpointRef::Kind::Resonator: return resonators[ref.index].contact_position;
    }
    return 0.0;
}

void ModelGraph::apply_force(const EndpointRef& ref, double f) {
    switch (ref.kind) {
    case EndpointRef::Kind::Mass: masses[ref.index].force += f; break;
    case EndpointRef::Kind::Resonator: resonators[ref.index].force += f; break;
    default: break; // ground and gesture are position sources
    }
}

void ModelGraph::prepare() {
    for (auto& r : resonators) {
        for (auto& md : r.modes) {
            const double radius = std::exp(-std::log(1000.0) / (md.t60 * sample_rate));
            const double angle = 2.0 * M_PI * md.frequency / sample_rate;
            md.a1 = 2.0 * radius * std::cos(angle);
            md.a2 = radius * radius;
        }
    }
    prepared_ = true;
}

double ModelGraph::step(double gesture_sample) {
    if (!prepared_) prepare(); // graph shape is fixed after construction
    const double g = clamp_gesture(gesture_sample);
    const double dt = 1.0 / sample_rate;

    // 1. link forces from current positions
    for (auto& s : springs) {
        const double xa = endpoint_position(s.a, g);
        const double xb = endpoint_position(s.b, g);
        // velocities by backward difference of the element states
        double va = 0.0, vb = 0.0;
        if (s.a.kind == EndpointRef::Kind::Mass) {
            const auto& m = masses[s.a.index];
            va = (m.position - m.previous_position) * sample_rate;
        }
        if (s.b.kind == EndpointRef::Kind::Mass) {
            const auto& m = masses[s.b.index];
            vb = (m.position - m.previous_position) * sample_rate;
        }
        const double f = -s.stiffness * (xa - xb) - s.damping * (va - vb);
        apply_force(s.a, f);
        apply_force(s.b, -f);
    }

    std::size_t pluck_index = 0;
    for (auto& p : plucks) {
        const double delta = (g - p.attach_offset) - endpoint_position(p.target, g);
        if (p.engaged) {
            if (std::abs(delta) >= p.threshold) {
                // leaving the window: a pluck if on the side opposite the
                // previous one (or the first ever), otherwise a silent
                // slip-back that keeps last_sign
                p.engaged = false;
                p.armed = false;
                const int s = sign_of(delta);
                if (!p.has_plucked || s == -p.last_sign) {
                    p.last_sign = s;
                    p.has_plucked = true;
                    events_.push_back({steps_, pluck_index, s});
                }
            } else {
                apply_force(p.target, p.stiffness * delta);
            }
        } else {
            if (!p.armed) {
                const int s = sign_of(delta);
                if (!p.has_plucked || s == -p.last_sign) p.armed = true;
            }
            if (p.armed && std::abs(delta) < p.threshold) {
                p.engaged = true;
                apply_force(p.target, p.stiffness * delta);
            }
        }
        ++pluck_index;
    }

    for (auto& t : touches) {
        const double p = (g - t.contact_offset) - endpoint_position(t.target, g);
        double f = 0.0;
        if (p > 0.0) {
            const double pdot = t.have_previous ? (p - t.previous_penetration) * sample_rate : 0.0;
            // spring-damper reaction on the contacted element
            f = t.stiffness * p + t.damping * pdot;
            apply_force(t.target, f);
        }
        t.previous_penetration = p;
        t.have_previous = true;
        t.last_force = f;
        t.last_penetration = p;
    }

    for (auto& fr : frictions) {
        const double gesture_velocity =
            fr.have_previous ? (g - fr.previous_gesture) * sample_rate : 0.0;
        double target_velocity = 0.0;
        if (fr.target.kind == EndpointRef::Kind::Mass) {
            const auto& m = masses[fr.target.index];
            target_velocity = (m.position - m.previous_position) * sample_rate;
        }
        const double vrel = gesture_velocity - target_velocity;
        if (vrel != 0.0) apply_force(fr.target, friction_force(vrel, fr.peak_force, fr.v0));
        fr.previous_gesture = g;
        fr.have_previous = true;
    }

    // 2. advance element states
    for (auto& m : masses) {
        const double next =
            2.0 * m.position - m.previous_position + (dt * dt / m.mass) * m.force;
        m.previous_position = m.position;
        m.position = next;
        m.force = 0.0;
    }
    for (auto& r : resonators) {
        double pos = 0.0;
        const double drive = dt * dt * r.force;
        for (auto& md : r.modes) {
            const double next = md.a1 * md.state - md.a2 * md.previous_state + drive;
            md.previous_state = md.state;
            md.state = next;
            pos += md.gain * md.state;
        }
        r.contact_position = pos;
        r.force = 0.0;
    }

    // 3. listen
    double out = 0.0;
    for (const auto& lp : listening_points) out += endpoint_position(lp, g);
    ++steps_;
    return output_gain * out;
}

void ModelGraph::reset() {
    for (auto& m : masses) {
        m.position = 0.0;
        m.previous_position = 0.0;
        m.force = 0.0;
    }
    for (auto& r : resonators) {
        for (auto& md : r.modes) {
            md.state = 0.0;
            md.previous_state = 0.0;
        }
        r.contact_position = 0.0;
        r.force = 0.0;
    }
    for (auto& p : plucks) {
        p.armed = true;
        p.engaged = false;
        p.last_sign = -1;
        p.has_plucked = false;
    }
    for (auto& t : touches) {
        t.previous_penetration = 0.0;
        t.have_previous = false;
        t.last_force = 0.0;
        t.last_penetration = 0.0;
    }
    for (auto& f : frictions) {
        f.previous_gesture = 0.0;
        f.have_previous = false;
    }
    events_.clear();
    steps_ = 0;
}

ModelGraph build_preset(ModelPreset preset) {
    ModelGraph graph;
    switch (preset) {
    case ModelPreset::PluckAResonator: {
        ModalResonator r;
        const double freqs[] = {440.0, 880.0, 1320.0};
        const double t60s[] = {1.0, 0.7, 0.4};
        const double gains[] = {1.0, 0.5, 0.25};
        for (int i = 0; i < 3; ++i) {
            Mode m;
            m.frequency = freqs[i];
            m.t60 = t60s[i];
            m.gain = gains[i];
            r.modes.push_back(m);
        }
        graph.resonators.push_back(r);

        PluckLink p;
        p.stiffness = 2000.0;
        p.threshold = 0.005;
        p.attach_offset = 0.0;
        p.target = EndpointRef::resonator(0);
        graph.plucks.push_back(p);

        graph.listening_points.push_back(EndpointRef::resonator(0));
        graph.output_gain = 2.2e4;
        break;
    }
    case ModelPreset::TouchSeveralModalResn: {
        const double fundamentals[] = {330.0, 440.0, 550.0};
        const double offsets[] = {-0.02, 0.0, 0.02};
        for (int i = 0; i < 3; ++i) {
            graph.resonators.push_back(harmonic_resonator(fundamentals[i], 3, 0.8));

            TouchLink t;
            t.stiffness = 3000.0;
            t.damping = 2.0;
            t.contact_offset = offsets[i];
            t.target = EndpointRef::resonator(static_cast<std::size_t>(i));
            graph.touches.push_back(t);

            graph.listening_points.push_back(EndpointRef::resonator(static_cast<std::size_t>(i)));
        }
        graph.output_gain = 1.1e3;
        break;
    }
    case ModelPreset::ScratchMassLinkChain: {
        const int n = 8;
        for (int i = 0; i < n; ++i) {
            PointMass m;
            m.mass = 0.005;
            graph.masses.push_back(m);
        }
        // chain grounded at both ends: ground-0-1-...-7-ground
        for (int i = 0; i <= n; ++i) {
            SpringLink s;
            s.stiffness = 5000.0;
            s.damping = 0.05;
            s.a = (i == 0) ? EndpointRef::ground() : EndpointRef::mass(static_cast<std::size_t>(i - 1));
            s.b = (i == n) ? EndpointRef::ground() : EndpointRef::mass(static_cast<std::size_t>(i));
            graph.springs.push_back(s);
        }
        FrictionLink f;
        f.peak_force = 0.5;
        f.v0 = 0.05;
        f.target = EndpointRef::mass(3);
        graph.frictions.push_back(f);

        graph.listening_points.push_back(EndpointRef::mass(5));
        graph.output_gain = 2.0e2;
        break;
    }
    case ModelPreset::PluckHarp10: {
        // A minor pentatonic from 220 Hz, two octaves: semitones 0,3,5,7,10,...
        const int semis[] = {0, 3, 5, 7, 10, 12, 15, 17, 19, 22};
        for (int i = 0; i < 10; ++i) {
            const double f0 = 220.0 * std::pow(2.0, semis[i] / 12.0);
            graph.resonators.push_back(harmonic_resonator(f0, 5, 1.2));

            PluckLink p;
            p.stiffness = 2000.0;
            p.threshold = 0.002;
            p.attach_offset = -0.045 + 0.01 * i;
            p.target = EndpointRef::resonator(static_cast<std::size_t>(i));
            graph.plucks.push_back(p);

            graph.listening_points.push_back(EndpointRef::resonator(static_cast<std::size_t>(i)));
        }
        graph.output_gain = 2.2e4;
        break;
    }
    }
    return graph;
}

AudioSignal render(ModelGraph& graph, const GestureSignal& gesture) {
    if (gesture.samples.empty()) throw EmptyInput("render: gesture has zero samples");
    AudioSignal out;
    out.sample_rate = graph.sample_rate;
    out.samples.resize(gesture.samples.size());
    for (std::size_t i = 0; i < gesture.samples.size(); ++i)
        out.samples[i] = graph.step(gesture.samples[i]);
    return out;
}

} // namespace invc
