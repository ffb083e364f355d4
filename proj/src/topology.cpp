#include "ficds/topology.hpp"

#include "ficds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ficds {

namespace {

void check_following(const InverterEquivalent& inv, const char* where) {
    if (inv.mode != InverterMode::grid_following)
        raise(Errc::topology_mismatch,
              std::string(where) + ": inverter must operate in grid-following mode");
}

void check_forming(const InverterEquivalent& inv, const char* where) {
    if (inv.mode != InverterMode::grid_forming)
        raise(Errc::topology_mismatch,
              std::string(where) + ": inverter must operate in grid-forming mode");
}

void check_load(double load_R) {
    if (!(load_R > 0.0))
        raise(Errc::invalid_parameters, "invalid parameter load.R: must be > 0");
}

Polynomial grid_impedance(const GridModel& g) { return Polynomial{g.Rs, g.Ls}; }

struct SlackParts {
    Polynomial nz;     // numerator of Z_slack
    Polynomial ds;     // denominator of Z_slack (1 for the grid branch)
    Polynomial source; // numerator of the slack source gain over ds (1 or G_v)
    bool is_grid = true;
};

SlackParts slack_parts(const SlackElement& slack) {
    SlackParts out;
    if (const auto* g = std::get_if<GridModel>(&slack)) {
        out.nz = grid_impedance(*g);
        out.ds = Polynomial{1.0};
        out.source = Polynomial{1.0};
        out.is_grid = true;
        return out;
    }
    const auto& former = std::get<InverterEquivalent>(slack);
    check_forming(former, "compose_general");
    out.nz = former.immitance_tf.num;
    out.ds = former.immitance_tf.den;
    out.source = former.source_tf.num; // shares ds as its denominator
    out.is_grid = false;
    return out;
}

std::vector<std::string> canonical_ids(bool grid_slack, std::size_t followers) {
    if (grid_slack && followers == 1)
        return {"CDS_1", "CDS_2"};
    if (grid_slack && followers == 2)
        return {"CDS_5", "CDS_6", "CDS_7"};
    if (!grid_slack && followers == 1)
        return {"CDS_8", "CDS_9"};
    std::vector<std::string> ids;
    for (std::size_t i = 0; i <= followers; ++i)
        ids.push_back("CDS_G" + std::to_string(i));
    return ids;
}

} // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: return "marginal";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

void validate(const MicrogridTopology& t) {
    check_load(t.load_R);
    if (t.grid) {
        if (!(t.grid->Rs >= 0.0))
            raise(Errc::invalid_parameters, "invalid parameter grid.Rs: must be >= 0");
        if (!(t.grid->Ls >= 0.0))
            raise(Errc::invalid_parameters, "invalid parameter grid.Ls: must be >= 0");
        if (!(t.grid->Vgrid_rms > 0.0))
            raise(Errc::invalid_parameters, "invalid parameter grid.Vgrid_rms: must be > 0");
    }
    std::size_t formers = 0;
    for (const auto& inv : t.inverters) {
        std::visit([](const auto& p) { validate(p); }, inv);
        if (std::holds_alternative<GridFormingParams>(inv))
            ++formers;
    }
    if (t.islanded() && formers == 0)
        raise(Errc::topology_mismatch,
              "islanded topology without a grid-forming member");
    if (formers > 1)
        raise(Errc::topology_mismatch, "at most one grid-forming inverter is supported");
    if (t.inverters.empty())
        raise(Errc::topology_mismatch, "topology contains no inverters");
}

std::vector<CdsIndex> compose_general(const SlackElement& slack,
                                      std::span<const InverterEquivalent> followers,
                                      double load_R) {
    check_load(load_R);
    const SlackParts sp = slack_parts(slack);
    for (const auto& f : followers)
        check_following(f, "compose_general");
    if (!sp.is_grid && followers.empty())
        raise(Errc::topology_mismatch, "compose_general: islanded slack needs followers");

    // Uniform clearing by R * ds * prod(den_i) keeps every index over one
    // shared polynomial denominator with no spurious common factors.
    Polynomial prod_all{1.0};
    for (const auto& f : followers)
        prod_all = prod_all * f.immitance_tf.den;

    Polynomial den = sp.ds * prod_all * load_R; // R*Ds*prod Dg  (the "1" term)
    for (std::size_t i = 0; i < followers.size(); ++i) {
        Polynomial part = followers[i].immitance_tf.num;
        for (std::size_t j = 0; j < followers.size(); ++j)
            if (j != i)
                part = part * followers[j].immitance_tf.den;
        den += sp.nz * part * load_R; // R*NZ*NY_i*prod_{j!=i}
    }
    den += sp.nz * prod_all; // NZ*prod Dg (load term)

    const auto ids = canonical_ids(sp.is_grid, followers.size());
    std::vector<CdsIndex> out;
    out.push_back({ids[0], RationalTF{sp.source * prod_all * load_R, den}});
    for (std::size_t i = 0; i < followers.size(); ++i) {
        Polynomial part = followers[i].source_tf.num * sp.nz;
        for (std::size_t j = 0; j < followers.size(); ++j)
            if (j != i)
                part = part * followers[j].immitance_tf.den;
        out.push_back({ids[i + 1], RationalTF{part * load_R, den}});
    }
    return out;
}

std::vector<CdsIndex> compose_a1(const GridModel& grid, const InverterEquivalent& inv,
                                 double load_R) {
    check_following(inv, "compose_a1");
    return compose_general(grid, std::span(&inv, 1), load_R);
}

std::vector<CdsIndex> compose_b1(const GridModel& grid, const InverterEquivalent& inv1,
                                 const InverterEquivalent& inv2, double load_R) {
    check_following(inv1, "compose_b1");
    check_following(inv2, "compose_b1");
    const InverterEquivalent both[2] = {inv1, inv2};
    return compose_general(grid, both, load_R);
}

std::vector<CdsIndex> compose_b2(const InverterEquivalent& former,
                                 const InverterEquivalent& follower, double load_R) {
    if (former.mode != InverterMode::grid_forming)
        raise(Errc::topology_mismatch,
              "compose_b2: islanded composition without a grid-forming member");
    check_following(follower, "compose_b2");
    return compose_general(former, std::span(&follower, 1), load_R);
}

std::vector<CdsIndex> compose_a2(const GridModel& grid, const InverterEquivalent& inv,
                                 double load_R) {
    check_forming(inv, "compose_a2");
    check_load(load_R);
    const Polynomial zg = grid_impedance(grid);
    const Polynomial& nz = inv.immitance_tf.num;
    const Polynomial& delta = inv.immitance_tf.den;
    const Polynomial& ngv = inv.source_tf.num;

    // Clearing multiplier R*NZ*Delta covers both Y_ov = Delta/NZ and G_v =
    // NGv/Delta, so CDS_3 and CDS_4 share the denominator exactly. The Delta
    // factor common to CDS_3's numerator and denominator stays unreduced.
    Polynomial pt = nz * load_R + zg * delta * load_R + zg * nz;
    Polynomial den = delta * pt;
    std::vector<CdsIndex> out;
    out.push_back({"CDS_3", RationalTF{nz * delta * load_R, den}});
    out.push_back({"CDS_4", RationalTF{nz * ngv * load_R, den}});
    return out;
}

CdsAssessment assess(const RationalTF& cds_tf, double threshold_band) {
    if (cds_tf.delay != 0.0)
        raise(Errc::delay_not_expanded,
              "assess: delay factor must be rationalized before pole extraction");
    if (threshold_band < 0.0)
        raise(Errc::invalid_argument, "assess: threshold band must be >= 0");

    CdsAssessment out;
    out.tf = cds_tf;
    if (cds_tf.den.degree() < 1) {
        out.max_real = -std::numeric_limits<double>::infinity();
        out.verdict = Verdict::stable;
        return out;
    }
    out.poles = poly_roots(cds_tf.den);
    out.max_real = out.poles.max_real();
    if (out.max_real > threshold_band)
        out.verdict = Verdict::unstable;
    else if (out.max_real < -threshold_band)
        out.verdict = Verdict::stable;
    else
        out.verdict = Verdict::marginal;
    return out;
}

std::string identify_system(const MicrogridTopology& t) {
    std::size_t gfl = 0, gfm = 0;
    for (const auto& inv : t.inverters) {
        if (std::holds_alternative<GridFollowingParams>(inv))
            ++gfl;
        else
            ++gfm;
    }
    if (t.grid && gfm == 0 && gfl == 1)
        return "A1";
    if (t.grid && gfm == 1 && gfl == 0)
        return "A2";
    if (t.grid && gfm == 0 && gfl == 2)
        return "B1";
    if (!t.grid && gfm == 1 && gfl == 1)
        return "B2";
    return "general";
}

std::vector<CdsIndex> compose_topology(const MicrogridTopology& t, int pade_order,
                                       GfmFormulation form) {
    validate(t);
    std::vector<InverterEquivalent> followers;
    std::optional<InverterEquivalent> former;
    for (const auto& inv : t.inverters) {
        if (const auto* p = std::get_if<GridFollowingParams>(&inv))
            followers.push_back(gfl_equivalent(*p, pade_order));
        else
            former = gfm_equivalent(std::get<GridFormingParams>(inv), pade_order, form);
    }
    if (t.grid && former && !followers.empty())
        raise(Errc::topology_mismatch,
              "grid-connected topology with both a grid-forming inverter and "
              "followers has two slack candidates");
    if (t.grid && former)
        return compose_a2(*t.grid, *former, t.load_R);
    if (t.grid)
        return compose_general(*t.grid, followers, t.load_R);
    return compose_general(*former, followers, t.load_R);
}

TopologyAssessment assess_topology(const MicrogridTopology& t, const AnalysisOptions& opts) {
    TopologyAssessment out;
    out.system = identify_system(t);
    auto indices = compose_topology(t, opts.pade_order, opts.gfm_form);
    out.indices.reserve(indices.size());
    for (auto& idx : indices) {
        CdsAssessment a = assess(idx.tf, opts.threshold_band);
        a.index_id = std::move(idx.id);
        out.indices.push_back(std::move(a));
    }
    out.max_real = out.indices.front().max_real;
    out.verdict = out.indices.front().verdict;
    return out;
}

RobustnessReport robustness_check(const MicrogridTopology& t, std::span<const int> orders,
                                  double threshold_band, GfmFormulation form) {
    if (orders.empty())
        raise(Errc::invalid_argument, "robustness_check: order list is empty");
    for (int o : orders)
        if (o < 1)
            raise(Errc::invalid_argument, "robustness_check: orders must be >= 1");

    RobustnessReport report;
    for (int order : orders) {
        auto indices = compose_topology(t, order, form);
        CdsAssessment a = assess(indices.front().tf, threshold_band);
        report.rows.push_back({order, a.verdict, a.max_real});
    }
    for (const auto& row : report.rows)
        if (row.verdict != report.rows.front().verdict)
            report.disagreement = true;
    return report;
}

} // namespace ficds
