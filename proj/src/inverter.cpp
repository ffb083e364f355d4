#include "ficds/inverter.hpp"

#include "ficds/errors.hpp"

#include <sstream>

namespace ficds {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "invalid parameter " << name << ": must be > 0 (got " << v << ")";
        raise(Errc::invalid_parameters, msg.str());
    }
}

void check_nonnegative(double v, const char* name) {
    if (!(v >= 0.0)) {
        std::ostringstream msg;
        msg << "invalid parameter " << name << ": must be >= 0 (got " << v << ")";
        raise(Errc::invalid_parameters, msg.str());
    }
}

void check_order(int order) {
    if (order < 1)
        raise(Errc::invalid_parameters, "invalid parameter delay_order: must be >= 1");
}

} // namespace

void validate(const GridFollowingParams& p) {
    check_nonnegative(p.kp, "kp");
    check_nonnegative(p.ki, "ki");
    check_positive(p.omega1, "omega1");
    check_positive(p.Ts, "Ts");
    check_positive(p.L1, "L1");
    check_nonnegative(p.R1, "R1");
    check_positive(p.C, "C");
    check_positive(p.L2, "L2");
    check_nonnegative(p.R2, "R2");
}

void validate(const GridFormingParams& p) {
    check_nonnegative(p.kpv, "kpv");
    check_nonnegative(p.kiv, "kiv");
    check_nonnegative(p.kpc, "kpc");
    check_positive(p.omega1, "omega1");
    check_positive(p.Ts, "Ts");
    check_positive(p.L, "L");
    check_nonnegative(p.RL, "RL");
    check_positive(p.C, "C");
}

InverterEquivalent gfl_equivalent(const GridFollowingParams& p, int delay_order) {
    validate(p);
    check_order(delay_order);

    const RationalTF gd = pade_delay(1.5 * p.Ts, delay_order);
    const Polynomial& nd = gd.num;
    const Polynomial& dd = gd.den;

    const Polynomial res{p.omega1 * p.omega1, 0.0, 1.0}; // s^2 + w1^2
    const Polynomial npr{p.kp * p.omega1 * p.omega1, p.ki, p.kp};
    const Polynomial zl1{p.R1, p.L1};
    const Polynomial zl2{p.R2, p.L2};
    const Polynomial sc{0.0, p.C};

    // Common denominator after clearing Z_c = 1/(sC), the PR resonance and
    // the Pade denominator in one pass; no duplicated factors survive.
    const Polynomial branch = zl1 + zl2 + sc * zl1 * zl2;
    const Polynomial dg = res * dd * branch + npr * nd;

    InverterEquivalent eq;
    eq.mode = InverterMode::grid_following;
    eq.omega1 = p.omega1;
    eq.immitance_tf = RationalTF{(Polynomial{1.0} + sc * zl1) * res * dd, dg};
    eq.source_tf = RationalTF{npr * nd, dg};
    return eq;
}

InverterEquivalent gfm_equivalent(const GridFormingParams& p, int delay_order,
                                  GfmFormulation form) {
    validate(p);
    check_order(delay_order);

    const RationalTF gd = pade_delay(1.5 * p.Ts, delay_order);
    const Polynomial& nd = gd.num;
    const Polynomial& dd = gd.den;

    const Polynomial res{p.omega1 * p.omega1, 0.0, 1.0};
    const Polynomial nprv{p.kpv * p.omega1 * p.omega1, p.kiv, p.kpv};
    const Polynomial zl{p.RL, p.L};
    const Polynomial sc{0.0, p.C};

    const Polynomial nz = res * (nd * p.kpc + zl * dd);
    const Polynomial ngv = nprv * nd * p.kpc;
    Polynomial delta;
    if (form == GfmFormulation::derived) {
        delta = res * (dd * (Polynomial{1.0} + sc * zl) + sc * nd * p.kpc) + nprv * nd * p.kpc;
    } else {
        // denominator as printed, without Z_c on the voltage-loop product
        delta = zl * sc * res * dd + res * dd + sc * nprv * nd * p.kpc + sc * res * nd * p.kpc;
    }

    InverterEquivalent eq;
    eq.mode = InverterMode::grid_forming;
    eq.omega1 = p.omega1;
    eq.immitance_tf = RationalTF{nz, delta};
    eq.source_tf = RationalTF{ngv, delta};
    return eq;
}

} // namespace ficds
