#include "ficds/sweep.hpp"

#include "ficds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <future>
#include <sstream>

namespace ficds {

namespace {

[[noreturn]] void bad_path(std::string_view path, const char* why) {
    std::ostringstream msg;
    msg << "parameter path '" << path << "': " << why;
    raise(Errc::path, msg.str());
}

double* gfl_field(GridFollowingParams& p, std::string_view name) {
    if (name == "kp") return &p.kp;
    if (name == "ki") return &p.ki;
    if (name == "omega1") return &p.omega1;
    if (name == "Ts") return &p.Ts;
    if (name == "L1") return &p.L1;
    if (name == "R1") return &p.R1;
    if (name == "C") return &p.C;
    if (name == "L2") return &p.L2;
    if (name == "R2") return &p.R2;
    return nullptr;
}

double* gfm_field(GridFormingParams& p, std::string_view name) {
    if (name == "kp" || name == "kpv") return &p.kpv;
    if (name == "ki" || name == "kiv") return &p.kiv;
    if (name == "kpc") return &p.kpc;
    if (name == "omega1") return &p.omega1;
    if (name == "Ts") return &p.Ts;
    if (name == "L" || name == "L1") return &p.L;
    if (name == "RL" || name == "R1") return &p.RL;
    if (name == "C") return &p.C;
    return nullptr;
}

/// Resolve a path on a mutable topology; the const accessor copies first.
double* resolve(MicrogridTopology& t, std::string_view path) {
    if (path == "load.R" || path == "load.R_ohm")
        return &t.load_R;
    if (path.starts_with("grid.")) {
        if (!t.grid)
            bad_path(path, "topology has no grid section");
        std::string_view f = path.substr(5);
        if (f == "Rs" || f == "Rs_ohm") return &t.grid->Rs;
        if (f == "Ls" || f == "Ls_H") return &t.grid->Ls;
        if (f == "Vgrid_rms") return &t.grid->Vgrid_rms;
        bad_path(path, "unknown grid field");
    }
    if (path.starts_with("inverter[")) {
        std::size_t close = path.find(']');
        if (close == std::string_view::npos || close + 1 >= path.size() || path[close + 1] != '.')
            bad_path(path, "expected inverter[<index>].<field>");
        std::size_t idx = 0;
        auto num = path.substr(9, close - 9);
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), idx);
        if (ec != std::errc{} || ptr != num.data() + num.size())
            bad_path(path, "bad inverter index");
        if (idx >= t.inverters.size())
            bad_path(path, "inverter index out of range");
        std::string_view field = path.substr(close + 2);
        double* out = nullptr;
        if (auto* g = std::get_if<GridFollowingParams>(&t.inverters[idx]))
            out = gfl_field(*g, field);
        else
            out = gfm_field(std::get<GridFormingParams>(t.inverters[idx]), field);
        if (!out)
            bad_path(path, "unknown inverter field");
        return out;
    }
    bad_path(path, "unknown section");
}

} // namespace

double get_param(const MicrogridTopology& t, std::string_view path) {
    MicrogridTopology copy = t;
    return *resolve(copy, path);
}

void set_param(MicrogridTopology& t, std::string_view path, double value) {
    if (!std::isfinite(value))
        raise(Errc::invalid_argument, "set_param: value must be finite");
    *resolve(t, path) = value;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1)
        raise(Errc::invalid_argument, "linspace: count must be >= 1");
    if (count == 1)
        return {lo};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return out;
}

SweepResult sweep(const MicrogridTopology& t, const SweepSpec& spec,
                  const AnalysisOptions& opts, bool parallel) {
    if (spec.values.empty())
        raise(Errc::invalid_argument, "sweep: value list is empty");
    for (double v : spec.values)
        if (!std::isfinite(v))
            raise(Errc::invalid_argument, "sweep: values must be finite");
    get_param(t, spec.param_path); // path errors surface before any work

    std::vector<double> values = spec.values;
    std::sort(values.begin(), values.end());

    auto run_one = [&](double v) -> SweepRow {
        SweepRow row;
        row.value = v;
        try {
            MicrogridTopology variant = t;
            set_param(variant, spec.param_path, v);
            TopologyAssessment a = assess_topology(variant, opts);
            row.verdict = a.verdict;
            row.max_real = a.max_real;
        } catch (const Error& e) {
            row.error = e.what();
        }
        return row;
    };

    SweepResult out;
    out.param_path = spec.param_path;
    out.rows.resize(values.size());
    if (parallel) {
        std::vector<std::future<SweepRow>> futures;
        futures.reserve(values.size());
        for (double v : values)
            futures.push_back(std::async(std::launch::async, run_one, v));
        for (std::size_t i = 0; i < futures.size(); ++i)
            out.rows[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            out.rows[i] = run_one(values[i]);
    }

    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        const auto& a = out.rows[i];
        const auto& b = out.rows[i + 1];
        if (!a.ok() || !b.ok())
            continue;
        bool flip = (a.verdict == Verdict::stable && b.verdict == Verdict::unstable) ||
                    (a.verdict == Verdict::unstable && b.verdict == Verdict::stable);
        if (flip) {
            double stable_v = a.verdict == Verdict::stable ? a.value : b.value;
            double unstable_v = a.verdict == Verdict::stable ? b.value : a.value;
            out.boundary_bracket = {stable_v, unstable_v};
            break;
        }
    }
    return out;
}

BoundaryResult find_boundary(const std::function<Verdict(double)>& verdict_at, double lo,
                             double hi, double rel_tol) {
    if (!(rel_tol > 0.0))
        raise(Errc::invalid_argument, "find_boundary: tol must be > 0");
    if (!(lo < hi))
        raise(Errc::invalid_argument, "find_boundary: need lo < hi");

    Verdict vlo = verdict_at(lo);
    Verdict vhi = verdict_at(hi);
    if (vlo == Verdict::marginal || vhi == Verdict::marginal)
        raise(Errc::ambiguous_endpoint, "find_boundary: endpoint verdict is marginal");
    if (vlo == vhi)
        raise(Errc::no_boundary, "find_boundary: both endpoints carry the same verdict");

    BoundaryResult out;
    out.verdict_lo = vlo;
    out.verdict_hi = vhi;
    while (std::abs(hi - lo) > rel_tol * std::abs(hi)) {
        double mid = 0.5 * (lo + hi);
        Verdict vm = verdict_at(mid);
        if (vm == Verdict::marginal) {
            out.marginal_stop = true; // refusing to guess inside the numerical dead zone
            break;
        }
        if (vm == vlo)
            lo = mid;
        else
            hi = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.critical = 0.5 * (lo + hi);
    return out;
}

BoundaryResult find_boundary(const MicrogridTopology& t, std::string_view path, double lo,
                             double hi, double rel_tol, const AnalysisOptions& opts) {
    get_param(t, path);
    std::string path_s(path);
    auto verdict_at = [&t, path_s, &opts](double v) {
        MicrogridTopology variant = t;
        set_param(variant, path_s, v);
        return assess_topology(variant, opts).verdict;
    };
    return find_boundary(verdict_at, lo, hi, rel_tol);
}

} // namespace ficds
