#pragma once

#include "ficds/inverter.hpp"
#include "ficds/roots.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ficds {

/// Grid interconnection: Z_grid = Rs + s*Ls behind an ideal 50 Hz source.
struct GridModel {
    double Rs = 0.4;
    double Ls = 0.3e-3;
    double Vgrid_rms = 230.0;
};

using InverterParams = std::variant<GridFollowingParams, GridFormingParams>;

/// Parameter-level description of a single-PCC microgrid. Absent grid means
/// islanded operation, which requires exactly one grid-forming member.
struct MicrogridTopology {
    std::optional<GridModel> grid;
    double load_R = 100.0;
    std::vector<InverterParams> inverters;

    [[nodiscard]] bool islanded() const { return !grid.has_value(); }
};

void validate(const MicrogridTopology& t);

enum class Verdict { stable, unstable, marginal, inconclusive };

std::string_view to_string(Verdict v);

/// One closed-loop CDS transfer function, labeled by input channel. All
/// indices of a composed system share the same denominator polynomial.
struct CdsIndex {
    std::string id;
    RationalTF tf;
};

std::vector<CdsIndex> compose_a1(const GridModel& grid, const InverterEquivalent& inv,
                                 double load_R);
std::vector<CdsIndex> compose_a2(const GridModel& grid, const InverterEquivalent& inv,
                                 double load_R);
std::vector<CdsIndex> compose_b1(const GridModel& grid, const InverterEquivalent& inv1,
                                 const InverterEquivalent& inv2, double load_R);
std::vector<CdsIndex> compose_b2(const InverterEquivalent& former,
                                 const InverterEquivalent& follower, double load_R);

/// Slack element of the generalized composition: either the grid branch or a
/// single grid-forming inverter.
using SlackElement = std::variant<GridModel, InverterEquivalent>;

/// N-inverter generalization with denominator 1 + Z_slack*(sum Y_oc,i + Y_load);
/// reproduces the A1/B1/B2 compositions for one or two followers.
std::vector<CdsIndex> compose_general(const SlackElement& slack,
                                      std::span<const InverterEquivalent> followers,
                                      double load_R);

struct CdsAssessment {
    std::string index_id;
    RationalTF tf;
    PoleSet poles;
    double max_real = 0.0; // rad/s; -inf when the index has no poles
    Verdict verdict = Verdict::stable;
};

inline constexpr double kDefaultThresholdBand = 1e-3; // rad/s

/// Verdict from the pole locations of the unreduced denominator: unstable if
/// some pole real part exceeds +band, stable if all lie below -band, marginal
/// inside the band. A constant denominator yields an empty pole set (stable).
CdsAssessment assess(const RationalTF& cds_tf, double threshold_band = kDefaultThresholdBand);

struct AnalysisOptions {
    int pade_order = 5;
    double threshold_band = kDefaultThresholdBand;
    std::vector<int> robustness_orders = {4, 5, 6, 7, 8};
    GfmFormulation gfm_form = GfmFormulation::derived;
};

struct TopologyAssessment {
    std::string system; // "A1", "A2", "B1", "B2" or "general"
    std::vector<CdsAssessment> indices;
    double max_real = 0.0;
    Verdict verdict = Verdict::stable;
};

/// Name the composition a topology maps to ("A1", "A2", "B1", "B2", "general").
std::string identify_system(const MicrogridTopology& t);

/// Build inverter equivalents at the given Pade order and dispatch to the
/// matching composition.
std::vector<CdsIndex> compose_topology(const MicrogridTopology& t, int pade_order,
                                       GfmFormulation form = GfmFormulation::derived);

/// Full pipeline: compose, extract poles, attach verdicts. The system verdict
/// is the first index's (all indices share the denominator).
TopologyAssessment assess_topology(const MicrogridTopology& t, const AnalysisOptions& opts);

struct RobustnessRow {
    int order = 0;
    Verdict verdict = Verdict::stable;
    double max_real = 0.0;
};

struct RobustnessReport {
    std::vector<RobustnessRow> rows;
    bool disagreement = false;
};

/// Re-assess at each Pade order and flag any verdict disagreement, guarding
/// against delay-approximation artifacts.
RobustnessReport robustness_check(const MicrogridTopology& t, std::span<const int> orders,
                                  double threshold_band = kDefaultThresholdBand,
                                  GfmFormulation form = GfmFormulation::derived);

} // namespace ficds
