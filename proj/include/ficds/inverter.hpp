#pragma once

#include "ficds/rational.hpp"

namespace ficds {

/// Grid-following inverter: PR current controller behind an LCL filter.
/// kp in ohm, ki in ohm/s, omega1 in rad/s, Ts in s, inductances in H,
/// resistances in ohm, capacitance in F.
struct GridFollowingParams {
    double kp = 7.0;
    double ki = 1000.0;
    double omega1 = 2.0 * kPi * 50.0;
    double Ts = 1e-4;
    double L1 = 1.2e-3;
    double R1 = 0.1;
    double C = 15e-6;
    double L2 = 0.3e-3;
    double R2 = 0.2;
};

/// Grid-forming inverter: PR voltage controller cascaded with a proportional
/// current controller behind an LC filter. kpv in S, kiv in S/s, kpc in ohm.
struct GridFormingParams {
    double kpv = 0.1;
    double kiv = 100.0;
    double kpc = 5.0;
    double omega1 = 2.0 * kPi * 50.0;
    double Ts = 1e-4;
    double L = 1.5e-3;
    double RL = 0.1;
    double C = 28e-6;
};

void validate(const GridFollowingParams& p);
void validate(const GridFormingParams& p);

enum class InverterMode { grid_following, grid_forming };

/// Small-signal equivalent at the inverter terminals. Grid-following units
/// are a Norton pair (source_tf = G_c, immitance_tf = Y_oc in siemens);
/// grid-forming units a Thevenin pair (source_tf = G_v, immitance_tf = Z_ov
/// in ohm). Delay is already rationalized: both members are plain rationals.
struct InverterEquivalent {
    InverterMode mode = InverterMode::grid_following;
    RationalTF source_tf;
    RationalTF immitance_tf;
    double omega1 = 2.0 * kPi * 50.0;
};

/// The grid-forming output equations admit two published shapes; the derived
/// one carries the filter-capacitor impedance on the voltage-loop term and is
/// the dimensionally consistent default. The other is kept for diagnostics.
enum class GfmFormulation { derived, printed };

/// Norton equivalent of a grid-following inverter with the control delay
/// 1.5*Ts replaced by a diagonal Pade approximant of the given order. Both
/// members are assembled over one common cleared denominator, so Y_oc and
/// G_c share their pole polynomial exactly.
InverterEquivalent gfl_equivalent(const GridFollowingParams& p, int delay_order);

/// Thevenin equivalent of a grid-forming inverter, same conventions.
InverterEquivalent gfm_equivalent(const GridFormingParams& p, int delay_order,
                                  GfmFormulation form = GfmFormulation::derived);

} // namespace ficds
