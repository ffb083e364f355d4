#pragma once

#include "ficds/topology.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ficds {

/// Dotted path into the topology parameter tree: "grid.Rs", "grid.Ls",
/// "grid.Vgrid_rms", "load.R", "inverter[i].<field>" with the field names of
/// GridFollowingParams / GridFormingParams ("kp"/"ki" alias "kpv"/"kiv" on a
/// grid-forming unit).
double get_param(const MicrogridTopology& t, std::string_view path);
void set_param(MicrogridTopology& t, std::string_view path, double value);

struct SweepSpec {
    std::string param_path;
    std::vector<double> values;
};

std::vector<double> linspace(double lo, double hi, int count);

struct SweepRow {
    double value = 0.0;
    Verdict verdict = Verdict::inconclusive;
    double max_real = 0.0;
    std::string error; // per-row failure, empty on success

    [[nodiscard]] bool ok() const { return error.empty(); }
};

struct SweepResult {
    std::string param_path;
    std::vector<SweepRow> rows; // ascending by value
    std::optional<std::pair<double, double>> boundary_bracket; // (last stable, first unstable)
};

/// One assessment per value; rows are ordered ascending and invariant-violating
/// values become per-row errors without aborting the sweep. With parallel set,
/// rows are computed concurrently; results are identical either way.
SweepResult sweep(const MicrogridTopology& t, const SweepSpec& spec,
                  const AnalysisOptions& opts, bool parallel = false);

struct BoundaryResult {
    double critical = 0.0; // midpoint of the final bracket
    double lo = 0.0, hi = 0.0;
    Verdict verdict_lo = Verdict::stable;
    Verdict verdict_hi = Verdict::unstable;
    bool marginal_stop = false; // bisection entered the marginal band
};

/// Bisection between verdicts on an arbitrary scalar classifier. The
/// endpoints must disagree and neither may be marginal; hitting a marginal
/// midpoint stops with the marginal band reported.
BoundaryResult find_boundary(const std::function<Verdict(double)>& verdict_at, double lo,
                             double hi, double rel_tol);

/// Bisection on one topology parameter using the pole-location verdict.
BoundaryResult find_boundary(const MicrogridTopology& t, std::string_view path, double lo,
                             double hi, double rel_tol, const AnalysisOptions& opts);

} // namespace ficds
