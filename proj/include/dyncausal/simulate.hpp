#pragma once

#include "dyncausal/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace dyncausal {

// State norm above which a path is aborted as divergent.
inline constexpr double kDivergenceGuard = 1e12;

struct StepControl {
    struct Rk4Fixed {
        double h = 0.01;
    };
    struct Rk45Adaptive {
        double rel_tol = 1e-8;
        double abs_tol = 1e-10;
        double max_step = 1.0;
    };
    std::variant<Rk4Fixed, Rk45Adaptive> method = Rk45Adaptive{};
    double t_end = 10.0;
    long max_steps = 2'000'000;
};

enum class RunOutcome { Ok, Divergence, NonConvergence };

struct IntegrationError : std::runtime_error {
    IntegrationError(RunOutcome o, const std::string& msg, Trajectory partial_)
        : std::runtime_error(msg), outcome(o), partial(std::move(partial_)) {}
    RunOutcome outcome;
    Trajectory partial;
};

namespace detail {

// Maps between the full endogenous state and the active (non-intervened)
// sub-state; intervened coordinates are substituted from their processes, not
// integrated.
struct ActiveLayout {
    std::vector<int> active_coords;  // full-state indices of the active coords

    static ActiveLayout build(const RandomDynamicalModel& rdm) {
        ActiveLayout lay;
        for (std::size_t j = 0; j < rdm.endo.size(); ++j) {
            if (!rdm.is_active(static_cast<int>(j))) continue;
            for (int c = 0; c < rdm.endo[j].dim; ++c) lay.active_coords.push_back(rdm.endo[j].offset + c);
        }
        return lay;
    }

    Vector gather(const Vector& full) const {
        Vector a(active_coords.size());
        for (std::size_t i = 0; i < active_coords.size(); ++i) a[i] = full[active_coords[i]];
        return a;
    }
    void scatter(const Vector& a, Vector& full) const {
        for (std::size_t i = 0; i < active_coords.size(); ++i) full[active_coords[i]] = a[i];
    }
};

struct Rhs {
    const RandomDynamicalModel& rdm;
    const RealizedModel& rm;
    const ActiveLayout& lay;
    mutable Vector x_full, e_full, f_full;

    Rhs(const RandomDynamicalModel& rdm_, const RealizedModel& rm_, const ActiveLayout& lay_)
        : rdm(rdm_), rm(rm_), lay(lay_) {
        x_full.resize(rdm.endo_dim());
        e_full.resize(rdm.exo_dim());
        f_full.resize(rdm.endo_dim());
    }

    void fill_full_state(double t, const Vector& active, Vector& out) const {
        lay.scatter(active, out);
        for (const auto& [k, rp] : rm.eta) {
            const Block& b = rdm.endo[k];
            out.segment(b.offset, b.dim) = rp.at(t);
        }
    }

    Vector operator()(double t, const Vector& active) const {
        fill_full_state(t, active, x_full);
        for (std::size_t j = 0; j < rm.exo.size(); ++j)
            e_full.segment(rdm.exo[j].offset, rdm.exo[j].dim) = rm.exo[j].at(t);
        eval_dynamics_into(rdm.dynamics, x_full, e_full, f_full);
        return lay.gather(f_full);
    }
};

}  // namespace detail

// Integrates one sample path of the (intervened) model. The trajectory covers
// the full state; intervened coordinates equal their process values exactly
// at every grid point. Deterministic in (rdm, init, ctrl, seed).
inline Trajectory integrate_path(const RandomDynamicalModel& rdm, const InitialCondition& init,
                                 const StepControl& ctrl, std::uint64_t path_seed, int path_id = 0) {
    rdm.validate();
    if (!(ctrl.t_end > init.t0)) throw std::invalid_argument("integrate_path: t_end must exceed t0");
    if (init.x0.dimension() != rdm.endo_dim())
        throw std::invalid_argument("integrate_path: initial condition dimension mismatch");

    const detail::ActiveLayout lay = detail::ActiveLayout::build(rdm);
    const RealizedModel rm = realize_model(rdm, path_seed);
    Rng init_rng(stream_seed(path_seed, StreamSlot::InitialState, 0));
    Vector x0_full = init.x0.sample(init_rng);

    // consistency with the intervened processes at t0 (per seed)
    for (const auto& [k, rp] : rm.eta) {
        const Block& b = rdm.endo[k];
        Vector eta0 = rp.at(init.t0);
        double err = (x0_full.segment(b.offset, b.dim) - eta0).norm();
        if (err > 1e-9 * (1.0 + eta0.norm()))
            throw std::invalid_argument("integrate_path: initial state on '" + b.name +
                                        "' disagrees with its intervened process at t0");
    }

    detail::Rhs rhs(rdm, rm, lay);
    Vector y = lay.gather(x0_full);

    std::vector<double> times;
    std::vector<Vector> states;
    auto record = [&](double t, const Vector& active) {
        Vector full(rdm.endo_dim());
        rhs.fill_full_state(t, active, full);
        times.push_back(t);
        states.push_back(full);
    };
    auto make_traj = [&]() {
        Trajectory traj;
        traj.path_id = path_id;
        traj.seed = path_seed;
        traj.times.resize(times.size());
        traj.values.resize(times.size(), rdm.endo_dim());
        for (std::size_t i = 0; i < times.size(); ++i) {
            traj.times[i] = times[i];
            traj.values.row(i) = states[i].transpose();
        }
        return traj;
    };
    auto guard = [&](double t, const Vector& active) {
        if (!active.allFinite() || active.norm() > kDivergenceGuard) {
            throw IntegrationError(RunOutcome::Divergence,
                                   "integrate_path: state diverged at t=" + std::to_string(t), make_traj());
        }
    };

    record(init.t0, y);

    if (const auto* fixed = std::get_if<StepControl::Rk4Fixed>(&ctrl.method)) {
        if (!(fixed->h > 0.0)) throw std::invalid_argument("integrate_path: step size must be positive");
        double t = init.t0;
        long steps = 0;
        while (t < ctrl.t_end - 1e-14 * std::max(1.0, std::abs(ctrl.t_end))) {
            if (++steps > ctrl.max_steps)
                throw IntegrationError(RunOutcome::NonConvergence, "integrate_path: max_steps exceeded", make_traj());
            double h = std::min(fixed->h, ctrl.t_end - t);
            Vector k1 = rhs(t, y);
            Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
            Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
            Vector k4 = rhs(t + h, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            guard(t, y);
            record(t, y);
        }
        return make_traj();
    }

    // Dormand-Prince 5(4) with standard step-size control.
    const auto& ad = std::get<StepControl::Rk45Adaptive>(ctrl.method);
    if (!(ad.rel_tol > 0.0) || !(ad.abs_tol > 0.0) || !(ad.max_step > 0.0))
        throw std::invalid_argument("integrate_path: tolerances and max_step must be positive");

    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = init.t0;
    double h = std::min(ad.max_step, (ctrl.t_end - init.t0) / 100.0);
    long steps = 0;
    while (t < ctrl.t_end - 1e-14 * std::max(1.0, std::abs(ctrl.t_end))) {
        if (++steps > ctrl.max_steps)
            throw IntegrationError(RunOutcome::NonConvergence, "integrate_path: max_steps exceeded", make_traj());
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError(RunOutcome::NonConvergence, "integrate_path: step size underflow", make_traj());
        h = std::min(h, ctrl.t_end - t);

        Vector k1 = rhs(t, y);
        Vector k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        Vector k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        Vector k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Vector k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vector k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vector k7 = rhs(t + h, y5);
        Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double sc = ad.abs_tol + ad.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            double r = err[i] / sc;
            err_norm += r * r;
        }
        err_norm = std::sqrt(err_norm / std::max<int>(1, static_cast<int>(y.size())));

        if (std::isfinite(err_norm) && err_norm <= 1.0) {
            y = y5;
            t += h;
            guard(t, y);
            record(t, y);
            double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
            h = std::min(ad.max_step, h * std::clamp(factor, 0.2, 5.0));
        } else {
            double factor = std::isfinite(err_norm) ? 0.9 * std::pow(err_norm, -0.2) : 0.2;
            h *= std::clamp(factor, 0.1, 0.9);
        }
    }
    return make_traj();
}

// Equilibration verdict for one sample path.
struct EquilibriumStatus {
    bool equilibrated = false;
    std::optional<Vector> x_star;
    double detection_time = std::numeric_limits<double>::quiet_NaN();
    double tail_drift = std::numeric_limits<double>::quiet_NaN();
    double derivative_norm = std::numeric_limits<double>::quiet_NaN();
    bool processes_settled = false;
};

struct DetectionParams {
    double eps_drift = 1e-6;
    double eps_deriv = 1e-6;
    double window_fraction = 0.2;
};

// A path equilibrates when, over the trailing window, the state stops moving
// (tail drift <= eps_drift), the active derivative has nearly vanished at the
// final time (<= eps_deriv), and every driving process has reached its limit.
inline EquilibriumStatus detect_equilibration(const Trajectory& traj, const RandomDynamicalModel& rdm,
                                              std::uint64_t path_seed, const DetectionParams& det) {
    if (!(det.window_fraction > 0.0 && det.window_fraction < 1.0))
        throw std::invalid_argument("detect_equilibration: window_fraction must lie in (0,1)");
    if (traj.times.size() < 2) throw std::invalid_argument("detect_equilibration: trajectory too short");

    EquilibriumStatus st;
    const int n = static_cast<int>(traj.times.size());
    const double t0 = traj.times[0], t_end = traj.times[n - 1];
    const double window_start = t_end - det.window_fraction * (t_end - t0);
    const Vector x_end = traj.values.row(n - 1).transpose();

    if (!x_end.allFinite()) return st;

    double drift = 0.0;
    for (int i = 0; i < n; ++i) {
        if (traj.times[i] < window_start) continue;
        drift = std::max(drift, (traj.values.row(i).transpose() - x_end).norm());
    }
    st.tail_drift = drift;

    // earliest time after which the path stays within eps_drift of its end state
    double detect = t_end;
    for (int i = n - 1; i >= 0; --i) {
        if ((traj.values.row(i).transpose() - x_end).norm() <= det.eps_drift)
            detect = traj.times[i];
        else
            break;
    }
    st.detection_time = detect;

    const RealizedModel rm = realize_model(rdm, path_seed);
    Vector e_end = rm.exo_at(t_end, rdm.exo_dim(), rdm.exo);
    Vector f = eval_dynamics(rdm.dynamics, x_end, e_end);
    double deriv = 0.0;
    for (std::size_t j = 0; j < rdm.endo.size(); ++j) {
        if (!rdm.is_active(static_cast<int>(j))) continue;
        deriv += f.segment(rdm.endo[j].offset, rdm.endo[j].dim).squaredNorm();
    }
    st.derivative_norm = std::sqrt(deriv);

    bool settled = true;
    for (const auto& rp : rm.exo) settled &= (rp.at(t_end) - rp.limit()).norm() <= det.eps_drift;
    for (const auto& [k, rp] : rm.eta) settled &= (rp.at(t_end) - rp.limit()).norm() <= det.eps_drift;
    st.processes_settled = settled;

    st.equilibrated = drift <= det.eps_drift && st.derivative_norm <= det.eps_deriv && settled;
    if (st.equilibrated) st.x_star = x_end;
    return st;
}

struct PathRecord {
    int path_id = 0;
    std::uint64_t seed = 0;
    RunOutcome outcome = RunOutcome::Ok;
    std::string message;
    EquilibriumStatus status;
    Vector x_final;  // last computed state (partial on failure)
    Vector e_star;   // sampled exogenous limits for this path
    std::optional<Trajectory> trajectory;
};

struct EnsembleResult {
    std::vector<PathRecord> paths;
    int n_equilibrated = 0;
    int n_failed = 0;
};

struct EnsembleOptions {
    bool store_trajectories = false;
    int n_threads = 1;
};

// Runs n_paths independent sample paths with seeds derived from master_seed.
// Per-path work is pure; results are keyed by path id, so the outcome is
// identical for any thread count. Per-path failures are recorded, never
// propagated.
inline EnsembleResult run_ensemble(const RandomDynamicalModel& rdm, const InitialCondition& init,
                                   const StepControl& ctrl, int n_paths, std::uint64_t master_seed,
                                   const DetectionParams& det = {}, const EnsembleOptions& opt = {}) {
    if (n_paths < 1) throw std::invalid_argument("run_ensemble: n_paths must be at least 1");
    EnsembleResult res;
    res.paths.resize(n_paths);

    auto run_one = [&](int p) {
        PathRecord rec;
        rec.path_id = p;
        rec.seed = derive_seed(master_seed, static_cast<std::uint64_t>(p));
        const RealizedModel rm = realize_model(rdm, rec.seed);
        rec.e_star = rm.exo_limit(rdm.exo_dim(), rdm.exo);
        try {
            Trajectory traj = integrate_path(rdm, init, ctrl, rec.seed, p);
            rec.status = detect_equilibration(traj, rdm, rec.seed, det);
            rec.x_final = traj.values.row(traj.times.size() - 1).transpose();
            if (opt.store_trajectories) rec.trajectory = std::move(traj);
        } catch (const IntegrationError& err) {
            rec.outcome = err.outcome;
            rec.message = err.what();
            if (err.partial.times.size() > 0) {
                rec.x_final = err.partial.values.row(err.partial.times.size() - 1).transpose();
                if (opt.store_trajectories) rec.trajectory = err.partial;
            } else {
                rec.x_final = Vector::Zero(rdm.endo_dim());
            }
        }
        res.paths[p] = std::move(rec);
    };

    const int threads = std::max(1, opt.n_threads);
    if (threads == 1) {
        for (int p = 0; p < n_paths; ++p) run_one(p);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t]() {
                for (int p = t; p < n_paths; p += threads) run_one(p);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& rec : res.paths) {
        if (rec.outcome != RunOutcome::Ok) ++res.n_failed;
        if (rec.status.equilibrated) ++res.n_equilibrated;
    }
    return res;
}

// Paired (X*, E*) samples over the equilibrated paths.
struct EquilibriumSamples {
    Matrix x_star;  // one row per equilibrated path
    Matrix e_star;
    std::vector<int> path_ids;
    std::vector<std::uint64_t> seeds;
};

inline EquilibriumSamples equilibrium_samples(const EnsembleResult& res) {
    if (res.n_equilibrated == 0) throw EmptyResultError("equilibrium_samples: no path equilibrated");
    EquilibriumSamples out;
    int xd = 0, ed = 0;
    for (const auto& rec : res.paths) {
        if (!rec.status.equilibrated) continue;
        xd = static_cast<int>(rec.status.x_star->size());
        ed = static_cast<int>(rec.e_star.size());
        break;
    }
    out.x_star.resize(res.n_equilibrated, xd);
    out.e_star.resize(res.n_equilibrated, ed);
    int r = 0;
    for (const auto& rec : res.paths) {
        if (!rec.status.equilibrated) continue;
        out.x_star.row(r) = rec.status.x_star->transpose();
        out.e_star.row(r) = rec.e_star.transpose();
        out.path_ids.push_back(rec.path_id);
        out.seeds.push_back(rec.seed);
        ++r;
    }
    return out;
}

// ---- CSV export -----------------------------------------------------------

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> column_names(const std::vector<Block>& blocks) {
    std::vector<std::string> names;
    for (const auto& b : blocks) {
        if (b.dim == 1) {
            names.push_back(b.name);
        } else {
            for (int c = 0; c < b.dim; ++c) names.push_back(b.name + "[" + std::to_string(c) + "]");
        }
    }
    return names;
}

// Columns: path_id, t, <endogenous coordinates>.
inline void write_trajectory_csv(std::ostream& out, const EnsembleResult& res, const RandomDynamicalModel& rdm) {
    out << "path_id,t";
    for (const auto& n : column_names(rdm.endo)) out << "," << n;
    out << "\n";
    for (const auto& rec : res.paths) {
        if (!rec.trajectory) continue;
        const Trajectory& tr = *rec.trajectory;
        for (int i = 0; i < tr.times.size(); ++i) {
            out << rec.path_id << "," << format_number(tr.times[i]);
            for (int c = 0; c < tr.values.cols(); ++c) out << "," << format_number(tr.values(i, c));
            out << "\n";
        }
    }
}

// Columns: path_id, equilibrated, <endogenous coordinates>, <exogenous limits>.
// Rows cover every path; non-equilibrated rows report the final computed state.
inline void write_equilibrium_csv(std::ostream& out, const EnsembleResult& res, const RandomDynamicalModel& rdm) {
    out << "path_id,equilibrated";
    for (const auto& n : column_names(rdm.endo)) out << "," << n;
    for (const auto& n : column_names(rdm.exo)) out << "," << n;
    out << "\n";
    for (const auto& rec : res.paths) {
        out << rec.path_id << "," << (rec.status.equilibrated ? 1 : 0);
        const Vector& x = rec.status.equilibrated ? *rec.status.x_star : rec.x_final;
        for (int c = 0; c < x.size(); ++c) out << "," << format_number(x[c]);
        for (int c = 0; c < rec.e_star.size(); ++c) out << "," << format_number(rec.e_star[c]);
        out << "\n";
    }
}

}  // namespace dyncausal
