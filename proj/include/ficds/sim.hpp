#pragma once

#include "ficds/topology.hpp"

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ficds {

/// Reference sources seen by the controllers, both at the system frequency.
/// Verdicts are scale-invariant in this linear model, so the amplitudes only
/// set the plotting scale.
struct SimReferences {
    double iref_amp = 10.0;                  // A
    double iref_phase = 0.0;                 // rad
    double vref_amp = 230.0 * std::sqrt(2.0); // V
    double vref_phase = 0.0;                 // rad
};

struct SimConfig {
    double control_rate_hz = 10000.0; // sets the 1.5/control_rate loop delay and the trace rate
    int plant_substeps = 50;          // RK4 substeps per control period (rounded up to even)
    double duration_s = 2.0;
    double system_freq_hz = 50.0;
    SimReferences references;
    double blowup_factor = 1e6;    // ceiling = factor * max source amplitude
    double window_fraction = 0.6;  // trailing fraction used by classify
};

/// Scripted run-time change. Events are applied in order at their times;
/// same-time events apply back to back.
struct Event {
    enum class Kind { set_parameter, island, switch_mode };

    double time_s = 0.0;
    Kind kind = Kind::set_parameter;
    std::string param;          // set_parameter: topology parameter path
    double value = 0.0;         // set_parameter
    std::size_t inverter = 0;   // switch_mode: roster slot to replace
    GridFormingParams former{}; // switch_mode: replacement grid-forming unit

    static Event set_parameter(double t, std::string path, double v);
    static Event island(double t);
    static Event switch_mode(double t, std::size_t slot, GridFormingParams p);
};

/// Time series sampled at the control rate. i_g keeps one column per roster
/// slot; a slot swapped to grid-forming keeps its column.
struct SimTrace {
    double sample_dt = 1e-4;
    double system_freq_hz = 50.0;
    std::vector<double> t;
    std::vector<double> v_pcc;
    std::vector<std::vector<double>> i_g;
    std::vector<double> energy; // total stored inductor/capacitor energy
    std::vector<std::pair<double, std::string>> markers;
    bool diverged = false;

    [[nodiscard]] double t_end() const { return t.empty() ? 0.0 : t.back() + sample_dt; }
};

/// Fixed-step RK4 integration of the closed loop: filters, grid branch and PR
/// controller states advance together as one linear plant, and the actuation
/// path carries an exact 1.5 control-period transport delay realized as a
/// ring buffer on the substep grid. Halts early and marks the trace diverged
/// when any state passes the blow-up ceiling.
SimTrace simulate(const MicrogridTopology& t, const SimConfig& cfg,
                  std::span<const Event> events = {});

struct Classification {
    Verdict verdict = Verdict::inconclusive;
    double slope = 0.0; // 1/s, trailing-window growth rate of the oscillation envelope
    int periods = 0;
};

/// Envelope-slope classification over [t0, t1): per fundamental period the
/// 50 Hz component is least-squares removed and the residual RMS forms the
/// envelope; the verdict follows the sign of its trailing log-slope against
/// the +/-0.5 1/s band. A diverged segment is always unstable. Throws
/// insufficient_data when fewer than 3 periods fall in the window.
Classification classify_segment(const SimTrace& trace, double t0, double t1,
                                double window_fraction);

/// Classification of the span after the last event marker (whole trace when
/// no events fired).
Classification classify(const SimTrace& trace, double window_fraction);

struct ScenarioSegment {
    double t0 = 0.0, t1 = 0.0;
    Verdict verdict = Verdict::inconclusive;
    double slope = 0.0;
};

struct ScenarioResult {
    SimTrace trace;
    std::vector<ScenarioSegment> segments;
};

/// Composite islanding script on a two-follower grid-connected microgrid:
/// kp of follower 0 is 6 until t=3 s and 7 after, the grid drops at t=3.3 s
/// while follower 1 hands over to the given grid-forming unit (capacitor
/// voltage continuity), and the former's kpv steps 0.1 -> 0.2 at t=3.4 s.
/// Returns the trace plus one verdict per inter-event segment.
ScenarioResult scenario_b(const MicrogridTopology& b1, const GridFormingParams& former,
                          const SimConfig& cfg);

} // namespace ficds
