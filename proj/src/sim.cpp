#include "ficds/sim.hpp"

#include "ficds/errors.hpp"
#include "ficds/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ficds {

Event Event::set_parameter(double t, std::string path, double v) {
    Event e;
    e.time_s = t;
    e.kind = Kind::set_parameter;
    e.param = std::move(path);
    e.value = v;
    return e;
}

Event Event::island(double t) {
    Event e;
    e.time_s = t;
    e.kind = Kind::island;
    return e;
}

Event Event::switch_mode(double t, std::size_t slot, GridFormingParams p) {
    Event e;
    e.time_s = t;
    e.kind = Kind::switch_mode;
    e.inverter = slot;
    e.former = p;
    return e;
}

namespace {

/// Actuation delay line on the substep grid; reads before the recorded
/// history return the zero pre-history.
class DelayRing {
public:
    explicit DelayRing(long lag = 0) { buf_.assign(static_cast<std::size_t>(lag) + 8, 0.0); }
    void clear() { std::fill(buf_.begin(), buf_.end(), 0.0); }
    void write(long idx, double v) { buf_[slot(idx)] = v; }
    [[nodiscard]] double read(long idx) const { return idx < 0 ? 0.0 : buf_[slot(idx)]; }

private:
    [[nodiscard]] std::size_t slot(long idx) const {
        return static_cast<std::size_t>(idx) % buf_.size();
    }
    std::vector<double> buf_;
};

struct InvRT {
    bool gfm = false;
    std::size_t off = 0;
    // gfl states: i1 vc ig xa xb; gfm states: iL vc xa xb.
    // gfm reuses L1 = L, R1 = RL, kp = kpv, ki = kiv.
    double L1 = 0, R1 = 0, C = 0, L2 = 0, R2 = 0;
    double kp = 0, ki = 0, kpc = 0, w1 = 0;

    [[nodiscard]] std::size_t dim() const { return gfm ? 4 : 5; }
};

class Engine {
public:
    Engine(const MicrogridTopology& t, const SimConfig& cfg, std::span<const Event> events)
        : topo_(t), cfg_(cfg), events_(events.begin(), events.end()) {
        validate(topo_);
        if (cfg_.control_rate_hz <= 0.0)
            raise(Errc::invalid_parameters,
                  "invalid parameter simulation.control_rate_hz: must be > 0");
        if (cfg_.plant_substeps < 4)
            raise(Errc::invalid_parameters,
                  "invalid parameter simulation.plant_substeps: must be >= 4");
        if (cfg_.duration_s <= 0.0)
            raise(Errc::insufficient_data, "zero-duration simulation");
        for (std::size_t i = 1; i < events_.size(); ++i)
            if (events_[i].time_s < events_[i - 1].time_s)
                raise(Errc::invalid_argument, "event times must be nondecreasing");

        ts_ = 1.0 / cfg_.control_rate_hz;
        substeps_ = cfg_.plant_substeps + (cfg_.plant_substeps % 2); // even keeps 1.5*Ts on the grid
        dt_ = ts_ / substeps_;
        lag_ = 3L * substeps_ / 2;
        wsys_ = 2.0 * kPi * cfg_.system_freq_hz;

        build_meta();
        x_.assign(dim_, 0.0);
        hist_.assign(invs_.size(), DelayRing(lag_));
        ceiling_ = cfg_.blowup_factor * nominal_scale();
    }

    SimTrace run() {
        SimTrace trace;
        trace.sample_dt = ts_;
        trace.system_freq_hz = cfg_.system_freq_hz;
        trace.i_g.resize(topo_.inverters.size());
        const long nsteps = static_cast<long>(std::llround(cfg_.duration_s / ts_)) * substeps_;

        std::size_t next_event = 0;
        for (std::size_t i = 0; i < hist_.size(); ++i)
            hist_[i].write(0, control_output(i, 0.0));

        for (long step = 0; step < nsteps; ++step) {
            const double t = static_cast<double>(step) * dt_;
            while (next_event < events_.size() && events_[next_event].time_s <= t + 0.5 * dt_) {
                apply_event(events_[next_event]);
                trace.markers.emplace_back(events_[next_event].time_s,
                                           event_label(events_[next_event]));
                ++next_event;
            }
            if (step % substeps_ == 0 && !record_sample(trace, t)) {
                trace.diverged = true;
                break;
            }
            advance(step, t);
        }
        return trace;
    }

private:
    [[nodiscard]] double nominal_scale() const {
        double s = std::max({cfg_.references.vref_amp, cfg_.references.iref_amp, 1.0});
        if (topo_.grid)
            s = std::max(s, std::sqrt(2.0) * topo_.grid->Vgrid_rms);
        return s;
    }

    /// Derive invs_/grid_off_/dim_ from the current topology; leaves x_ and
    /// the delay lines alone.
    void build_meta() {
        invs_.clear();
        std::size_t off = 0;
        for (const auto& ip : topo_.inverters) {
            InvRT rt;
            rt.off = off;
            if (const auto* g = std::get_if<GridFollowingParams>(&ip)) {
                rt.gfm = false;
                rt.L1 = g->L1; rt.R1 = g->R1; rt.C = g->C; rt.L2 = g->L2; rt.R2 = g->R2;
                rt.kp = g->kp; rt.ki = g->ki; rt.w1 = g->omega1;
            } else {
                const auto& f = std::get<GridFormingParams>(ip);
                rt.gfm = true;
                rt.L1 = f.L; rt.R1 = f.RL; rt.C = f.C;
                rt.kp = f.kpv; rt.ki = f.kiv; rt.kpc = f.kpc; rt.w1 = f.omega1;
            }
            invs_.push_back(rt);
            off += rt.dim();
        }
        grid_off_ = topo_.grid ? static_cast<long>(off) : -1;
        if (topo_.grid)
            ++off;
        dim_ = off;
        scratch_.k1.resize(dim_);
        scratch_.k2.resize(dim_);
        scratch_.k3.resize(dim_);
        scratch_.k4.resize(dim_);
        scratch_.xt.resize(dim_);
    }

    void apply_event(const Event& ev) {
        switch (ev.kind) {
        case Event::Kind::set_parameter: {
            set_param(topo_, ev.param, ev.value);
            validate(topo_);
            build_meta(); // state layout is unchanged by a scalar edit
            break;
        }
        case Event::Kind::island: {
            if (!topo_.grid)
                raise(Errc::invalid_argument, "island event: topology has no grid to disconnect");
            std::vector<double> old = x_;
            const long gofs = grid_off_;
            topo_.grid.reset();
            build_meta();
            old.erase(old.begin() + gofs);
            x_ = std::move(old);
            break;
        }
        case Event::Kind::switch_mode: {
            if (ev.inverter >= topo_.inverters.size())
                raise(Errc::invalid_argument, "switch-mode event: inverter index out of range");
            if (std::holds_alternative<GridFormingParams>(topo_.inverters[ev.inverter]))
                raise(Errc::invalid_argument,
                      "switch-mode event: inverter already operates grid-forming");
            validate(ev.former);

            const double vp = vpcc(x_);
            double ig_others = grid_off_ >= 0 ? x_[static_cast<std::size_t>(grid_off_)] : 0.0;
            std::vector<std::vector<double>> saved(invs_.size());
            for (std::size_t i = 0; i < invs_.size(); ++i) {
                saved[i].assign(x_.begin() + static_cast<long>(invs_[i].off),
                                x_.begin() + static_cast<long>(invs_[i].off + invs_[i].dim()));
                if (i != ev.inverter && !invs_[i].gfm)
                    ig_others += x_[invs_[i].off + 2];
            }
            const double is_state =
                grid_off_ >= 0 ? x_[static_cast<std::size_t>(grid_off_)] : 0.0;
            const bool had_grid = topo_.grid.has_value();

            topo_.inverters[ev.inverter] = ev.former;
            build_meta();
            x_.assign(dim_, 0.0);
            for (std::size_t i = 0; i < invs_.size(); ++i) {
                if (i == ev.inverter) {
                    // handover: capacitor voltage continuity; the inductor
                    // starts at the load share the unit must supply
                    x_[invs_[i].off + 0] = vp / topo_.load_R - ig_others;
                    x_[invs_[i].off + 1] = vp;
                } else {
                    std::copy(saved[i].begin(), saved[i].end(),
                              x_.begin() + static_cast<long>(invs_[i].off));
                }
            }
            if (had_grid && grid_off_ >= 0)
                x_[static_cast<std::size_t>(grid_off_)] = is_state;
            hist_[ev.inverter].clear();
            break;
        }
        }
    }

    static std::string event_label(const Event& ev) {
        switch (ev.kind) {
        case Event::Kind::set_parameter:
            return "set " + ev.param;
        case Event::Kind::island:
            return "island";
        case Event::Kind::switch_mode:
            return "switch-mode inverter[" + std::to_string(ev.inverter) + "]";
        }
        return {};
    }

    [[nodiscard]] double vpcc(const std::vector<double>& x) const {
        for (const auto& inv : invs_)
            if (inv.gfm)
                return x[inv.off + 1];
        double tot = grid_off_ >= 0 ? x[static_cast<std::size_t>(grid_off_)] : 0.0;
        for (const auto& inv : invs_)
            tot += x[inv.off + 2];
        return topo_.load_R * tot;
    }

    [[nodiscard]] double iref(double t) const {
        return cfg_.references.iref_amp * std::sin(wsys_ * t + cfg_.references.iref_phase);
    }
    [[nodiscard]] double vref(double t) const {
        return cfg_.references.vref_amp * std::sin(wsys_ * t + cfg_.references.vref_phase);
    }
    [[nodiscard]] double vgrid(double t) const {
        return topo_.grid ? std::sqrt(2.0) * topo_.grid->Vgrid_rms * std::sin(wsys_ * t) : 0.0;
    }

    [[nodiscard]] double control_output(std::size_t i, double t) const {
        const InvRT& inv = invs_[i];
        if (!inv.gfm) {
            const double e = iref(t) - x_[inv.off + 2];
            return inv.kp * e + inv.ki * x_[inv.off + 3];
        }
        const double e = vref(t) - x_[inv.off + 1];
        const double iref_inner = inv.kp * e + inv.ki * x_[inv.off + 2];
        return inv.kpc * (iref_inner - x_[inv.off + 0]);
    }

    void deriv(const std::vector<double>& x, double t, std::span<const double> acts,
               std::vector<double>& dx) const {
        const double vp = vpcc(x);
        double inj = grid_off_ >= 0 ? x[static_cast<std::size_t>(grid_off_)] : 0.0;
        for (const auto& inv : invs_)
            if (!inv.gfm)
                inj += x[inv.off + 2];
        for (std::size_t i = 0; i < invs_.size(); ++i) {
            const InvRT& inv = invs_[i];
            const std::size_t o = inv.off;
            if (!inv.gfm) {
                const double e = iref(t) - x[o + 2];
                dx[o + 0] = (acts[i] - inv.R1 * x[o + 0] - x[o + 1]) / inv.L1;
                dx[o + 1] = (x[o + 0] - x[o + 2]) / inv.C;
                dx[o + 2] = (x[o + 1] - inv.R2 * x[o + 2] - vp) / inv.L2;
                dx[o + 3] = -inv.w1 * x[o + 4] + e;
                dx[o + 4] = inv.w1 * x[o + 3];
            } else {
                const double e = vref(t) - x[o + 1];
                dx[o + 0] = (acts[i] - inv.R1 * x[o + 0] - x[o + 1]) / inv.L1;
                dx[o + 1] = (x[o + 0] + inj - x[o + 1] / topo_.load_R) / inv.C;
                dx[o + 2] = -inv.w1 * x[o + 3] + e;
                dx[o + 3] = inv.w1 * x[o + 2];
            }
        }
        if (grid_off_ >= 0) {
            const std::size_t o = static_cast<std::size_t>(grid_off_);
            dx[o] = (vgrid(t) - topo_.grid->Rs * x[o] - vp) / topo_.grid->Ls;
        }
    }

    void advance(long step, double t) {
        const std::size_t n = invs_.size();
        acts0_.resize(n);
        acts1_.resize(n);
        acts2_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = hist_[i].read(step - lag_);
            const double b = hist_[i].read(step - lag_ + 1);
            acts0_[i] = a;
            acts1_[i] = 0.5 * (a + b);
            acts2_[i] = b;
        }
        auto& s = scratch_;
        deriv(x_, t, acts0_, s.k1);
        axpy(s.xt, x_, s.k1, 0.5 * dt_);
        deriv(s.xt, t + 0.5 * dt_, acts1_, s.k2);
        axpy(s.xt, x_, s.k2, 0.5 * dt_);
        deriv(s.xt, t + 0.5 * dt_, acts1_, s.k3);
        axpy(s.xt, x_, s.k3, dt_);
        deriv(s.xt, t + dt_, acts2_, s.k4);
        for (std::size_t i = 0; i < x_.size(); ++i)
            x_[i] += dt_ / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
        for (std::size_t i = 0; i < n; ++i)
            hist_[i].write(step + 1, control_output(i, t + dt_));
    }

    static void axpy(std::vector<double>& out, const std::vector<double>& x,
                     const std::vector<double>& k, double h) {
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = x[i] + h * k[i];
    }

    bool record_sample(SimTrace& trace, double t) {
        const double vp = vpcc(x_);
        trace.t.push_back(t);
        trace.v_pcc.push_back(vp);
        double gfl_sum = grid_off_ >= 0 ? x_[static_cast<std::size_t>(grid_off_)] : 0.0;
        for (const auto& inv : invs_)
            if (!inv.gfm)
                gfl_sum += x_[inv.off + 2];
        for (std::size_t i = 0; i < invs_.size(); ++i) {
            const InvRT& inv = invs_[i];
            const double ig = inv.gfm ? vp / topo_.load_R - gfl_sum : x_[inv.off + 2];
            trace.i_g[i].push_back(ig);
        }
        double en = 0.0;
        for (const auto& inv : invs_) {
            en += 0.5 * inv.L1 * x_[inv.off] * x_[inv.off] +
                  0.5 * inv.C * x_[inv.off + 1] * x_[inv.off + 1];
            if (!inv.gfm)
                en += 0.5 * inv.L2 * x_[inv.off + 2] * x_[inv.off + 2];
        }
        if (grid_off_ >= 0) {
            const double is = x_[static_cast<std::size_t>(grid_off_)];
            en += 0.5 * topo_.grid->Ls * is * is;
        }
        trace.energy.push_back(en);

        if (std::abs(vp) > ceiling_ || !std::isfinite(vp))
            return false;
        for (double v : x_)
            if (std::abs(v) > ceiling_ || !std::isfinite(v))
                return false;
        return true;
    }

    MicrogridTopology topo_;
    SimConfig cfg_;
    std::vector<Event> events_;
    std::vector<InvRT> invs_;
    std::vector<DelayRing> hist_;
    std::vector<double> x_;
    long grid_off_ = -1;
    std::size_t dim_ = 0;
    double ts_ = 1e-4, dt_ = 0.0, wsys_ = 0.0, ceiling_ = 0.0;
    int substeps_ = 0;
    long lag_ = 0;
    struct Scratch {
        std::vector<double> k1, k2, k3, k4, xt;
    } scratch_;
    std::vector<double> acts0_, acts1_, acts2_;
};

} // namespace

SimTrace simulate(const MicrogridTopology& t, const SimConfig& cfg,
                  std::span<const Event> events) {
    Engine engine(t, cfg, events);
    return engine.run();
}

namespace {

struct PeriodRow {
    double mid = 0.0;
    double full_rms = 0.0;
    double resid_rms = 0.0;
};

} // namespace

Classification classify_segment(const SimTrace& trace, double t0, double t1,
                                double window_fraction) {
    if (trace.t.empty())
        raise(Errc::insufficient_data, "classify: empty trace");
    const double data_end = trace.t_end();
    if (trace.diverged && t1 >= data_end - 0.5 * trace.sample_dt)
        return {Verdict::unstable, std::numeric_limits<double>::infinity(), 0};

    const double period = 1.0 / trace.system_freq_hz;
    t1 = std::min(t1, data_end);
    const int nper = static_cast<int>(std::floor((t1 - t0) / period + 1e-9));
    if (nper < 3)
        raise(Errc::insufficient_data, "classify: window holds fewer than 3 fundamental periods");

    const std::size_t i0 =
        static_cast<std::size_t>(std::llround(std::max(0.0, t0 / trace.sample_dt)));
    const std::size_t per_n = static_cast<std::size_t>(std::llround(period / trace.sample_dt));
    std::vector<PeriodRow> rows;
    rows.reserve(static_cast<std::size_t>(nper));
    for (int k = 0; k < nper; ++k) {
        const std::size_t a = i0 + static_cast<std::size_t>(k) * per_n;
        if (a + per_n > trace.v_pcc.size())
            break;
        // a full uniform period makes {1, sin, cos} orthogonal, so the 50 Hz
        // component drops out with three dot products
        double sum = 0, sum2 = 0, ss = 0, sc = 0;
        for (std::size_t j = a; j < a + per_n; ++j) {
            const double v = trace.v_pcc[j];
            const double ph = 2.0 * kPi * trace.system_freq_hz * trace.t[j];
            sum += v;
            sum2 += v * v;
            ss += v * std::sin(ph);
            sc += v * std::cos(ph);
        }
        const double n = static_cast<double>(per_n);
        const double mean = sum / n;
        const double bs = 2.0 * ss / n;
        const double bc = 2.0 * sc / n;
        PeriodRow row;
        row.mid = trace.t[a] + 0.5 * period;
        row.full_rms = std::sqrt(sum2 / n);
        row.resid_rms =
            std::sqrt(std::max(0.0, sum2 / n - mean * mean - 0.5 * (bs * bs + bc * bc)));
        rows.push_back(row);
    }
    if (rows.size() < 3)
        raise(Errc::insufficient_data, "classify: window holds fewer than 3 fundamental periods");

    std::vector<double> fulls;
    fulls.reserve(rows.size());
    for (const auto& r : rows)
        fulls.push_back(r.full_rms);
    std::nth_element(fulls.begin(), fulls.begin() + static_cast<long>(fulls.size() / 2),
                     fulls.end());
    const double median_full = fulls[fulls.size() / 2];
    const double floor_rms = 1e-6 * std::max(median_full, 1e-12);

    std::size_t n0 = static_cast<std::size_t>(
        std::floor(static_cast<double>(rows.size()) * (1.0 - window_fraction)));
    n0 = std::min(n0, rows.size() - 3);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double nw = static_cast<double>(rows.size() - n0);
    for (std::size_t i = n0; i < rows.size(); ++i) {
        const double x = rows[i].mid;
        const double y = std::log(std::max(rows[i].resid_rms, floor_rms));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = nw * sxx - sx * sx;
    const double slope = denom != 0.0 ? (nw * sxy - sx * sy) / denom : 0.0;

    Classification out;
    out.slope = slope;
    out.periods = static_cast<int>(rows.size());
    if (slope > 0.5) {
        out.verdict = Verdict::unstable;
    } else if (slope < -0.5) {
        out.verdict = Verdict::stable;
    } else {
        double max_full = 0.0;
        for (const auto& r : rows)
            max_full = std::max(max_full, r.full_rms);
        out.verdict =
            max_full <= 10.0 * median_full + 1e-9 ? Verdict::stable : Verdict::inconclusive;
    }
    return out;
}

Classification classify(const SimTrace& trace, double window_fraction) {
    if (trace.diverged)
        return {Verdict::unstable, std::numeric_limits<double>::infinity(), 0};
    double t0 = 0.0;
    for (const auto& [tm, label] : trace.markers)
        t0 = std::max(t0, tm);
    return classify_segment(trace, t0, trace.t_end(), window_fraction);
}

ScenarioResult scenario_b(const MicrogridTopology& b1, const GridFormingParams& former,
                          const SimConfig& cfg) {
    validate(b1);
    if (identify_system(b1) != "B1")
        raise(Errc::topology_mismatch,
              "scenario_b: expects a grid-connected topology with two grid-following inverters");
    validate(former);
    if (cfg.duration_s < 3.5)
        raise(Errc::invalid_argument, "scenario_b: duration must reach past the last event (3.4 s)");

    std::vector<Event> events;
    events.push_back(Event::set_parameter(0.0, "inverter[0].kp", 6.0));
    events.push_back(Event::set_parameter(3.0, "inverter[0].kp", 7.0));
    events.push_back(Event::island(3.3));
    events.push_back(Event::switch_mode(3.3, 1, former));
    events.push_back(Event::set_parameter(3.4, "inverter[1].kpv", 0.2));

    ScenarioResult out;
    out.trace = simulate(b1, cfg, events);
    const double tend = out.trace.t_end();
    const double bounds[] = {0.0, 3.0, 3.3, 3.4, tend};
    for (int k = 0; k < 4; ++k) {
        ScenarioSegment seg;
        seg.t0 = bounds[k];
        seg.t1 = bounds[k + 1];
        Classification c = classify_segment(out.trace, seg.t0, seg.t1, cfg.window_fraction);
        seg.verdict = c.verdict;
        seg.slope = c.slope;
        out.segments.push_back(seg);
    }
    return out;
}

} // namespace ficds
