#pragma once

#include "dyncausal/dynamics.hpp"
#include "dyncausal/graph.hpp"
#include "dyncausal/process.hpp"
#include "dyncausal/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyncausal {

// Random dynamical model: named endogenous/exogenous blocks, a set K of
// intervened blocks forced to follow convergent processes, and dynamics for
// the remaining blocks. Models are immutable values; interventions return new
// models. The dynamics descriptor keeps rows for every block, with K marking
// which rows are inactive, so composed interventions compare structurally.
struct RandomDynamicalModel {
    std::vector<Block> endo;
    std::vector<Block> exo;
    std::set<int> intervened;                           // K, by endogenous block index
    DynamicsDescriptor dynamics;                        // full-row descriptor
    std::map<int, ProcessSpec> intervened_processes;    // defined exactly on K
    std::vector<ProcessSpec> exogenous_processes;       // one per exogenous block

    int endo_dim() const { return total_dim(endo); }
    int exo_dim() const { return total_dim(exo); }

    void validate() const {
        if (exogenous_processes.size() != exo.size())
            throw std::invalid_argument("rdm: one exogenous process spec per exogenous block required");
        for (std::size_t j = 0; j < exo.size(); ++j)
            if (exogenous_processes[j].dimension() != exo[j].dim)
                throw std::invalid_argument("rdm: exogenous process dimension mismatch on '" + exo[j].name + "'");
        for (int k : intervened)
            if (k < 0 || k >= static_cast<int>(endo.size()))
                throw std::invalid_argument("rdm: intervened index out of range");
        if (intervened_processes.size() != intervened.size())
            throw std::invalid_argument("rdm: intervened process map must cover exactly K");
        for (const auto& [k, spec] : intervened_processes) {
            if (!intervened.count(k)) throw std::invalid_argument("rdm: process given for non-intervened block");
            if (spec.dimension() != endo[k].dim)
                throw std::invalid_argument("rdm: intervened process dimension mismatch on '" + endo[k].name + "'");
        }
        if (const auto* lin = std::get_if<LinearDynamics>(&dynamics)) {
            if (lin->B.rows() != endo_dim() || lin->B.cols() != endo_dim())
                throw std::invalid_argument("rdm: B must be endo_dim x endo_dim");
            if (exo_dim() > 0 && (lin->Gamma.rows() != endo_dim() || lin->Gamma.cols() != exo_dim()))
                throw std::invalid_argument("rdm: Gamma must be endo_dim x exo_dim");
            if (lin->drive.size() > 0 && lin->drive.size() != endo_dim())
                throw std::invalid_argument("rdm: drive must have endogenous dimension");
        }
        if (std::holds_alternative<MassActionDynamics>(dynamics)) {
            const auto& ma = std::get<MassActionDynamics>(dynamics);
            for (const auto& b : endo)
                if (b.dim != 1) throw std::invalid_argument("rdm: mass-action species must be scalar blocks");
            if (ma.inflow.size() != endo_dim() || ma.outflow.size() != endo_dim())
                throw std::invalid_argument("rdm: mass-action inflow/outflow must have one entry per species");
        }
    }

    bool is_active(int block) const { return intervened.count(block) == 0; }
};

struct InitialCondition {
    double t0 = 0.0;
    RandomVariableSpec x0;  // over the full endogenous dimension
};

// Observational linear model Xdot = B X + Gamma E (+ drive), K empty.
inline RandomDynamicalModel make_linear_rdm(Matrix B, Matrix Gamma, std::vector<ProcessSpec> exo_specs,
                                            std::vector<Block> endo_blocks = {}, std::vector<Block> exo_blocks = {},
                                            Vector drive = {}) {
    RandomDynamicalModel rdm;
    const int n = static_cast<int>(B.rows());
    if (B.cols() != n) throw std::invalid_argument("make_linear_rdm: B must be square");
    if (endo_blocks.empty())
        for (int i = 0; i < n; ++i) endo_blocks.push_back({"x" + std::to_string(i + 1), 1, 0});
    if (exo_blocks.empty()) {
        int m = static_cast<int>(Gamma.cols());
        for (int j = 0; j < m; ++j) exo_blocks.push_back({"e" + std::to_string(j + 1), 1, 0});
    }
    rdm.endo = layout_blocks(std::move(endo_blocks));
    rdm.exo = layout_blocks(std::move(exo_blocks));
    if (total_dim(rdm.endo) != n) throw std::invalid_argument("make_linear_rdm: endogenous blocks do not match B");
    if (total_dim(rdm.exo) != Gamma.cols())
        throw std::invalid_argument("make_linear_rdm: exogenous blocks do not match Gamma");
    rdm.dynamics = LinearDynamics{std::move(B), std::move(Gamma), std::move(drive)};
    rdm.exogenous_processes = std::move(exo_specs);
    rdm.validate();
    return rdm;
}

// Perfect intervention do(I, xi): forces blocks I to follow the given
// processes and deactivates their dynamics rows (Ksets compose as I u K, with
// xi overriding on overlap).
inline RandomDynamicalModel intervene_rdm(const RandomDynamicalModel& rdm, const std::set<int>& I,
                                          const std::map<int, ProcessSpec>& xi) {
    for (int i : I)
        if (i < 0 || i >= static_cast<int>(rdm.endo.size()))
            throw std::invalid_argument("intervene_rdm: target index out of range");
    if (xi.size() != I.size()) throw std::invalid_argument("intervene_rdm: one process per intervened block required");
    for (const auto& [i, spec] : xi) {
        if (!I.count(i)) throw std::invalid_argument("intervene_rdm: process given for block outside I");
        if (spec.dimension() != rdm.endo[i].dim)
            throw std::invalid_argument("intervene_rdm: process dimension mismatch on '" + rdm.endo[i].name + "'");
        if (!is_convergent(spec))
            throw std::invalid_argument("intervene_rdm: only convergent processes keep the model steady");
    }
    RandomDynamicalModel out = rdm;
    for (int i : I) {
        out.intervened.insert(i);
        out.intervened_processes.erase(i);
    }
    for (const auto& [i, spec] : xi) out.intervened_processes.emplace(i, spec);
    return out;
}

inline RandomDynamicalModel intervene_rdm(const RandomDynamicalModel& rdm, const std::string& target,
                                          const ProcessSpec& spec) {
    int i = find_block(rdm.endo, target);
    if (i < 0) throw std::invalid_argument("intervene_rdm: unknown block '" + target + "'");
    return intervene_rdm(rdm, {i}, {{i, spec}});
}

// Structural equality (same blocks, same K, same processes, same dynamics
// data). Used by the intervention-algebra tests.
inline bool rdm_structurally_equal(const RandomDynamicalModel& a, const RandomDynamicalModel& b) {
    auto blocks_equal = [](const std::vector<Block>& x, const std::vector<Block>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].name != y[i].name || x[i].dim != y[i].dim) return false;
        return true;
    };
    if (!blocks_equal(a.endo, b.endo) || !blocks_equal(a.exo, b.exo)) return false;
    if (a.intervened != b.intervened) return false;
    if (a.intervened_processes != b.intervened_processes) return false;
    if (a.exogenous_processes != b.exogenous_processes) return false;
    if (a.dynamics.index() != b.dynamics.index()) return false;
    if (const auto* la = std::get_if<LinearDynamics>(&a.dynamics)) {
        const auto& lb = std::get<LinearDynamics>(b.dynamics);
        Vector da = la->drive.size() ? la->drive : Vector::Zero(la->B.rows());
        Vector db = lb.drive.size() ? lb.drive : Vector::Zero(lb.B.rows());
        return exact_equal(la->B, lb.B) && exact_equal(la->Gamma, lb.Gamma) && exact_equal(da, db);
    }
    if (const auto* ma = std::get_if<MassActionDynamics>(&a.dynamics)) {
        const auto& mb = std::get<MassActionDynamics>(b.dynamics);
        return ma->reactions == mb.reactions && exact_equal(ma->inflow, mb.inflow) &&
               exact_equal(ma->outflow, mb.outflow);
    }
    return false;  // custom dynamics: no structural identity beyond probing
}

// Functional graph of the model (nodes = endogenous blocks). A directed edge
// i -> j is drawn when block i feeds the dynamics of a non-intervened block
// j; self-dependencies of a derivative on its own block are not drawn. A
// bidirected edge joins two non-intervened blocks sharing an exogenous
// parent. Intervened blocks keep outgoing edges but receive none.
//
// Declared patterns of black-box dynamics are probed before use; a mismatch
// raises a diagnostic listing the offending inputs.
inline DirectedMixedGraph functional_graph_rdm(const RandomDynamicalModel& rdm) {
    if (std::holds_alternative<CustomDynamics>(rdm.dynamics)) {
        DependencyCheck chk = verify_dependencies(rdm.dynamics, rdm.endo, rdm.exo, 32);
        if (!chk.ok) {
            std::string msg = "functional_graph_rdm: declared dependency pattern failed probing:";
            for (const auto& m : chk.mismatches) msg += "\n  " + m;
            throw std::invalid_argument(msg);
        }
    }
    const DependencyPattern pat = dependency_pattern(rdm.dynamics, rdm.endo, rdm.exo);
    std::vector<std::string> names;
    for (const auto& b : rdm.endo) names.push_back(b.name);
    DirectedMixedGraph g(names);
    for (std::size_t j = 0; j < rdm.endo.size(); ++j) {
        if (!rdm.is_active(static_cast<int>(j))) continue;
        for (int i : pat.endo[j])
            if (i != static_cast<int>(j)) g.add_directed(rdm.endo[i].name, rdm.endo[j].name);
    }
    for (std::size_t j1 = 0; j1 < rdm.endo.size(); ++j1) {
        if (!rdm.is_active(static_cast<int>(j1))) continue;
        for (std::size_t j2 = j1 + 1; j2 < rdm.endo.size(); ++j2) {
            if (!rdm.is_active(static_cast<int>(j2))) continue;
            for (int k : pat.exo[j1]) {
                if (pat.exo[j2].count(k)) {
                    g.add_bidirected(rdm.endo[j1].name, rdm.endo[j2].name);
                    break;
                }
            }
        }
    }
    return g;
}

// Realized per-path randomness of a model: intervened and exogenous processes
// with their draws fixed. Sub-stream seeds depend only on (path_seed, slot,
// block index).
struct RealizedModel {
    std::map<int, RealizedProcess> eta;
    std::vector<RealizedProcess> exo;

    Vector exo_at(double t, int exo_dim, const std::vector<Block>& exo_blocks) const {
        Vector e(exo_dim);
        for (std::size_t j = 0; j < exo.size(); ++j)
            e.segment(exo_blocks[j].offset, exo_blocks[j].dim) = exo[j].at(t);
        return e;
    }
    Vector exo_limit(int exo_dim, const std::vector<Block>& exo_blocks) const {
        Vector e(exo_dim);
        for (std::size_t j = 0; j < exo.size(); ++j)
            e.segment(exo_blocks[j].offset, exo_blocks[j].dim) = exo[j].limit();
        return e;
    }
};

inline RealizedModel realize_model(const RandomDynamicalModel& rdm, std::uint64_t path_seed) {
    RealizedModel rm;
    for (const auto& [k, spec] : rdm.intervened_processes)
        rm.eta.emplace(k, RealizedProcess(spec, stream_seed(path_seed, StreamSlot::Intervened, k)));
    for (std::size_t j = 0; j < rdm.exogenous_processes.size(); ++j)
        rm.exo.emplace_back(rdm.exogenous_processes[j], stream_seed(path_seed, StreamSlot::Exogenous, j));
    return rm;
}

// Max observed ratio ||F(x1,.) - F(x2,.)|| / ||x1 - x2|| over random pairs in
// the box and random (t, path) draws; a lower bound on the local Lipschitz
// constant of the active dynamics.
inline double estimate_lipschitz(const RandomDynamicalModel& rdm, const Vector& box_lo, const Vector& box_hi,
                                 int n_samples, std::uint64_t seed, double t_probe = 10.0) {
    const int dx = rdm.endo_dim();
    if (box_lo.size() != dx || box_hi.size() != dx)
        throw std::invalid_argument("estimate_lipschitz: box must span the endogenous dimension");
    double active_width = 0.0;
    for (std::size_t j = 0; j < rdm.endo.size(); ++j) {
        if (!rdm.is_active(static_cast<int>(j))) continue;
        const Block& b = rdm.endo[j];
        for (int c = 0; c < b.dim; ++c) active_width += box_hi[b.offset + c] - box_lo[b.offset + c];
    }
    if (!(active_width > 0.0))
        throw std::invalid_argument("estimate_lipschitz: degenerate box, x1 = x2 forced");

    double best = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        std::uint64_t ps = derive_seed(seed, static_cast<std::uint64_t>(s));
        Rng rng(derive_seed(ps, 0x51ull));
        RealizedModel rm = realize_model(rdm, ps);
        double t = rng.uniform(0.0, t_probe);
        Vector e = rm.exo_at(t, rdm.exo_dim(), rdm.exo);
        Vector x1(dx), x2(dx);
        for (int i = 0; i < dx; ++i) {
            x1[i] = rng.uniform(box_lo[i], box_hi[i]);
            x2[i] = rng.uniform(box_lo[i], box_hi[i]);
        }
        for (const auto& [k, rp] : rm.eta) {
            const Block& b = rdm.endo[k];
            x1.segment(b.offset, b.dim) = rp.at(t);
            x2.segment(b.offset, b.dim) = rp.at(t);
        }
        double dist = (x1 - x2).norm();
        if (dist <= 0.0) continue;
        Vector f1 = eval_dynamics(rdm.dynamics, x1, e);
        Vector f2 = eval_dynamics(rdm.dynamics, x2, e);
        double num = 0.0;
        for (std::size_t j = 0; j < rdm.endo.size(); ++j) {
            if (!rdm.is_active(static_cast<int>(j))) continue;
            num += (f1 - f2).segment(rdm.endo[j].offset, rdm.endo[j].dim).squaredNorm();
        }
        best = std::max(best, std::sqrt(num) / dist);
    }
    return best;
}

// Steadiness / regularity report. Steadiness itself holds by construction
// (only convergent process variants exist); the report adds continuity
// probes, a Lipschitz estimate and a contractivity diagnostic.
struct SteadyReport {
    bool steady = true;
    bool processes_convergent = true;
    bool dynamics_finite_on_probes = true;
    double lipschitz_estimate = 0.0;
    double max_eigen_real = std::numeric_limits<double>::quiet_NaN();  // linear active part
    bool non_contractive = false;
    std::vector<std::string> notes;
};

inline SteadyReport check_steady(const RandomDynamicalModel& rdm, std::uint64_t seed = 2024) {
    SteadyReport rep;
    for (const auto& spec : rdm.exogenous_processes) rep.processes_convergent &= is_convergent(spec);
    for (const auto& [k, spec] : rdm.intervened_processes) rep.processes_convergent &= is_convergent(spec);

    const int dx = rdm.endo_dim();
    Vector lo = Vector::Constant(dx, -2.0), hi = Vector::Constant(dx, 2.0);
    bool degenerate = true;
    for (int i = 0; i < dx; ++i) degenerate &= !(hi[i] > lo[i]);
    rep.lipschitz_estimate = degenerate ? 0.0 : estimate_lipschitz(rdm, lo, hi, 256, seed);

    Rng rng(derive_seed(seed, 0x77ull));
    for (int p = 0; p < 16; ++p) {
        Vector x(dx), e(rdm.exo_dim());
        for (int i = 0; i < dx; ++i) x[i] = rng.uniform(-2.0, 2.0);
        for (int i = 0; i < rdm.exo_dim(); ++i) e[i] = rng.uniform(-2.0, 2.0);
        Vector f = eval_dynamics(rdm.dynamics, x, e);
        if (!f.allFinite()) rep.dynamics_finite_on_probes = false;
    }

    if (const auto* lin = std::get_if<LinearDynamics>(&rdm.dynamics)) {
        std::vector<int> active_idx;
        for (std::size_t j = 0; j < rdm.endo.size(); ++j)
            if (rdm.is_active(static_cast<int>(j)))
                for (int c = 0; c < rdm.endo[j].dim; ++c) active_idx.push_back(rdm.endo[j].offset + c);
        if (!active_idx.empty()) {
            Matrix Ba(active_idx.size(), active_idx.size());
            for (std::size_t r = 0; r < active_idx.size(); ++r)
                for (std::size_t c = 0; c < active_idx.size(); ++c) Ba(r, c) = lin->B(active_idx[r], active_idx[c]);
            Eigen::EigenSolver<Matrix> es(Ba);
            rep.max_eigen_real = es.eigenvalues().real().maxCoeff();
            if (rep.max_eigen_real >= 0.0) {
                rep.non_contractive = true;
                std::ostringstream msg;
                msg << "non-contractive dynamics: max eigenvalue real part " << rep.max_eigen_real;
                rep.notes.push_back(msg.str());
            }
        }
    }

    rep.steady = rep.processes_convergent && rep.dynamics_finite_on_probes;
    return rep;
}

}  // namespace dyncausal
