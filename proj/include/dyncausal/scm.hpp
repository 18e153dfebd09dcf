#pragma once

#include "dyncausal/rdm.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dyncausal {

// f(x, e) = A x + Gamma e + b on the non-fixed rows.
struct LinearMechanism {
    Matrix A;
    Matrix Gamma;
    Vector b;
};

// f(x, e) = x + F(x, e) on the active rows (the equilibrium map of a
// dynamical model); fixed rows carry the intervened/limit values.
struct FromDynamicsMechanism {
    DynamicsDescriptor dynamics;
    std::set<int> active;  // endo block indices with a dynamical row
};

// Black-box mechanism with declared dependency pattern.
struct CustomMechanism {
    std::function<Vector(const Vector&, const Vector&)> eval;
    std::vector<std::set<int>> endo_parents;
    std::vector<std::set<int>> exo_parents;
};

using Mechanism = std::variant<LinearMechanism, FromDynamicsMechanism, CustomMechanism>;

// Structural causal model over named blocks. Rows listed in fixed_rows are
// forced to a (possibly random) value; all other rows follow the mechanism.
// Values are immutable; interventions return new models.
struct StructuralCausalModel {
    std::vector<Block> endo;
    std::vector<Block> exo;
    Mechanism mechanism;
    std::map<int, RandomVariableSpec> fixed_rows;
    std::vector<RandomVariableSpec> exo_star;  // one limit variable per exogenous block

    int endo_dim() const { return total_dim(endo); }
    int exo_dim() const { return total_dim(exo); }
};

using FixedRowValues = std::map<int, Vector>;

// Samples the fixed rows with the same per-block sub-streams the simulator
// uses for intervened processes, so SCM-side values match path-side limits
// seed for seed.
inline FixedRowValues realize_fixed_rows(const StructuralCausalModel& scm, std::uint64_t path_seed) {
    FixedRowValues out;
    for (const auto& [i, spec] : scm.fixed_rows) {
        Rng rng(stream_seed(path_seed, StreamSlot::Intervened, i));
        out.emplace(i, spec.sample(rng));
    }
    return out;
}

inline Vector scm_eval(const StructuralCausalModel& scm, const Vector& x, const Vector& e,
                       const FixedRowValues& fixed) {
    if (x.size() != scm.endo_dim() || e.size() != scm.exo_dim())
        throw std::invalid_argument("scm_eval: dimension mismatch");
    Vector f(scm.endo_dim());
    if (const auto* lin = std::get_if<LinearMechanism>(&scm.mechanism)) {
        f = lin->A * x;
        if (lin->Gamma.cols() > 0) f += lin->Gamma * e;
        if (lin->b.size() > 0) f += lin->b;
    } else if (const auto* fd = std::get_if<FromDynamicsMechanism>(&scm.mechanism)) {
        Vector F = eval_dynamics(fd->dynamics, x, e);
        f = x + F;
    } else {
        f = std::get<CustomMechanism>(scm.mechanism).eval(x, e);
    }
    for (const auto& [i, spec] : scm.fixed_rows) {
        auto it = fixed.find(i);
        if (it == fixed.end()) throw std::invalid_argument("scm_eval: missing value for fixed row");
        f.segment(scm.endo[i].offset, scm.endo[i].dim) = it->second;
    }
    return f;
}

inline Vector scm_eval(const StructuralCausalModel& scm, const Vector& x, const Vector& e, std::uint64_t seed) {
    return scm_eval(scm, x, e, realize_fixed_rows(scm, seed));
}

namespace detail {

inline FixedRowValues point_mass_fixed_values(const StructuralCausalModel& scm, const char* who) {
    FixedRowValues out;
    for (const auto& [i, spec] : scm.fixed_rows) {
        if (!spec.is_point_mass())
            throw std::invalid_argument(std::string(who) +
                                        ": fixed row '" + scm.endo[i].name +
                                        "' is random; pass a seed to realize it");
        out.emplace(i, spec.value());
    }
    return out;
}

}  // namespace detail

// ||x - f(x,e)||_2, the defect of the structural equations at (x, e).
inline double residual(const StructuralCausalModel& scm, const Vector& x, const Vector& e) {
    return (x - scm_eval(scm, x, e, detail::point_mass_fixed_values(scm, "residual"))).norm();
}

inline double residual(const StructuralCausalModel& scm, const Vector& x, const Vector& e, std::uint64_t seed) {
    return (x - scm_eval(scm, x, e, realize_fixed_rows(scm, seed))).norm();
}

// One sampled solution of the structural equations, with its defect measured
// against the stored mechanism at construction time.
struct SolutionSample {
    std::uint64_t seed = 0;
    Vector x_star;
    Vector e_star;
    double residual = 0.0;
};

inline SolutionSample make_solution_sample(const StructuralCausalModel& scm, std::uint64_t seed, Vector x_star,
                                           Vector e_star) {
    SolutionSample s;
    s.seed = seed;
    s.residual = residual(scm, x_star, e_star, seed);
    s.x_star = std::move(x_star);
    s.e_star = std::move(e_star);
    return s;
}

// The SCM associated to a steady model: mechanism rows x + F(x,e) for the
// free blocks, limit variables for the intervened blocks, exogenous limits as
// E*. Linear dynamics produce the linear mechanism A = I + B directly.
inline StructuralCausalModel scm_from_rdm(const RandomDynamicalModel& rdm) {
    rdm.validate();
    StructuralCausalModel scm;
    scm.endo = rdm.endo;
    scm.exo = rdm.exo;
    for (const auto& spec : rdm.exogenous_processes) scm.exo_star.push_back(spec.limit_spec());
    for (const auto& [k, spec] : rdm.intervened_processes) scm.fixed_rows.emplace(k, spec.limit_spec());

    if (const auto* lin = std::get_if<LinearDynamics>(&rdm.dynamics)) {
        const int n = rdm.endo_dim();
        LinearMechanism mech;
        mech.A = Matrix::Identity(n, n) + lin->B;
        mech.Gamma = lin->Gamma;
        mech.b = lin->drive.size() ? lin->drive : Vector::Zero(n);
        for (int k : rdm.intervened) {
            const Block& blk = rdm.endo[k];
            mech.A.middleRows(blk.offset, blk.dim).setZero();
            if (mech.Gamma.cols() > 0) mech.Gamma.middleRows(blk.offset, blk.dim).setZero();
            mech.b.segment(blk.offset, blk.dim).setZero();
        }
        scm.mechanism = std::move(mech);
    } else {
        FromDynamicsMechanism mech;
        mech.dynamics = rdm.dynamics;
        for (std::size_t j = 0; j < rdm.endo.size(); ++j)
            if (rdm.is_active(static_cast<int>(j))) mech.active.insert(static_cast<int>(j));
        scm.mechanism = std::move(mech);
    }
    return scm;
}

// Perfect intervention on the SCM: replace rows I by fixed values.
inline StructuralCausalModel intervene_scm(const StructuralCausalModel& scm,
                                           const std::map<int, RandomVariableSpec>& xi_star) {
    StructuralCausalModel out = scm;
    for (const auto& [i, spec] : xi_star) {
        if (i < 0 || i >= static_cast<int>(scm.endo.size()))
            throw std::invalid_argument("intervene_scm: target index out of range");
        if (spec.dimension() != scm.endo[i].dim)
            throw std::invalid_argument("intervene_scm: value dimension mismatch on '" + scm.endo[i].name + "'");
        out.fixed_rows.erase(i);
        out.fixed_rows.emplace(i, spec);
        if (auto* lin = std::get_if<LinearMechanism>(&out.mechanism)) {
            const Block& blk = scm.endo[i];
            lin->A.middleRows(blk.offset, blk.dim).setZero();
            if (lin->Gamma.cols() > 0) lin->Gamma.middleRows(blk.offset, blk.dim).setZero();
            lin->b.segment(blk.offset, blk.dim).setZero();
        } else if (auto* fd = std::get_if<FromDynamicsMechanism>(&out.mechanism)) {
            fd->active.erase(i);
        }
    }
    return out;
}

// Spec form: do(I, xi*) with a concrete value vector over the I coordinates.
inline StructuralCausalModel intervene_scm(const StructuralCausalModel& scm, const std::set<int>& I,
                                           const Vector& xi_star) {
    int dim = 0;
    for (int i : I) {
        if (i < 0 || i >= static_cast<int>(scm.endo.size()))
            throw std::invalid_argument("intervene_scm: target index out of range");
        dim += scm.endo[i].dim;
    }
    if (xi_star.size() != dim) throw std::invalid_argument("intervene_scm: value vector does not span I");
    std::map<int, RandomVariableSpec> m;
    int off = 0;
    for (int i : I) {  // std::set iterates in ascending block order
        m.emplace(i, RandomVariableSpec::point_mass(xi_star.segment(off, scm.endo[i].dim).eval()));
        off += scm.endo[i].dim;
    }
    return intervene_scm(scm, m);
}

inline StructuralCausalModel intervene_scm(const StructuralCausalModel& scm, const std::string& name, double value) {
    int i = find_block(scm.endo, name);
    if (i < 0) throw std::invalid_argument("intervene_scm: unknown block '" + name + "'");
    return intervene_scm(scm, {{i, RandomVariableSpec::point_mass(Vector::Constant(scm.endo[i].dim, value))}});
}

struct LinearSolve {
    Vector x;
    double condition = 0.0;
};

namespace detail {

// Pulls a linear-mechanism view out of an SCM when one exists.
inline std::optional<LinearMechanism> linear_view(const StructuralCausalModel& scm) {
    if (const auto* lin = std::get_if<LinearMechanism>(&scm.mechanism)) return *lin;
    if (const auto* fd = std::get_if<FromDynamicsMechanism>(&scm.mechanism)) {
        if (const auto* ld = std::get_if<LinearDynamics>(&fd->dynamics)) {
            const int n = scm.endo_dim();
            LinearMechanism mech;
            mech.A = Matrix::Identity(n, n) + ld->B;
            mech.Gamma = ld->Gamma;
            mech.b = ld->drive.size() ? ld->drive : Vector::Zero(n);
            for (std::size_t j = 0; j < scm.endo.size(); ++j) {
                if (fd->active.count(static_cast<int>(j))) continue;
                const Block& blk = scm.endo[j];
                mech.A.middleRows(blk.offset, blk.dim).setZero();
                if (mech.Gamma.cols() > 0) mech.Gamma.middleRows(blk.offset, blk.dim).setZero();
                mech.b.segment(blk.offset, blk.dim).setZero();
            }
            return mech;
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Solves x = A x + Gamma e + b (fixed rows at their realized values). Reports
// the condition number of I - A; a singular system raises
// NoUniqueSolutionError. For nonlinear mechanisms the fixed-point Jacobian is
// probed: a singular Jacobian is the same not-uniquely-solvable situation.
inline LinearSolve solve_linear_scm(const StructuralCausalModel& scm, const Vector& e, std::uint64_t seed = 0) {
    if (e.size() != scm.exo_dim()) throw std::invalid_argument("solve_linear_scm: exogenous dimension mismatch");
    const int n = scm.endo_dim();
    const FixedRowValues fixed = realize_fixed_rows(scm, seed);

    auto lin = detail::linear_view(scm);
    if (!lin) {
        // nonlinear: probe d(x - f)/dx for structural rank deficiency
        Rng rng(derive_seed(seed, 0xABCDull));
        Vector x0(n);
        for (int i = 0; i < n; ++i) x0[i] = 1.0 + 0.1 * rng.uniform01();
        const double h = 1e-6;
        Matrix J(n, n);
        for (int c = 0; c < n; ++c) {
            Vector xp = x0, xm = x0;
            xp[c] += h;
            xm[c] -= h;
            Vector gp = xp - scm_eval(scm, xp, e, fixed);
            Vector gm = xm - scm_eval(scm, xm, e, fixed);
            J.col(c) = (gp - gm) / (2.0 * h);
        }
        Eigen::JacobiSVD<Matrix> svd(J);
        double smin = svd.singularValues().minCoeff(), smax = svd.singularValues().maxCoeff();
        if (smax <= 0.0 || smin / smax < 1e-10)
            throw NoUniqueSolutionError("solve_linear_scm: model is not uniquely solvable "
                                        "(singular fixed-point Jacobian)");
        throw std::invalid_argument("solve_linear_scm: mechanism is not linear");
    }

    Matrix A = lin->A;
    Matrix G = lin->Gamma;
    Vector b = lin->b.size() ? lin->b : Vector::Zero(n);
    for (const auto& [i, v] : fixed) {
        const Block& blk = scm.endo[i];
        A.middleRows(blk.offset, blk.dim).setZero();
        if (G.cols() > 0) G.middleRows(blk.offset, blk.dim).setZero();
        b.segment(blk.offset, blk.dim) = v;
    }
    Matrix D = Matrix::Identity(n, n) - A;
    Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues().minCoeff(), smax = svd.singularValues().maxCoeff();
    if (smax <= 0.0 || smin / smax < 1e-12) {
        std::ostringstream msg;
        msg << "solve_linear_scm: I - A is singular (condition " << (smin > 0 ? smax / smin : 1e308)
            << "); the model is not uniquely solvable";
        throw NoUniqueSolutionError(msg.str());
    }
    Vector rhs = b;
    if (G.cols() > 0) rhs += G * e;
    LinearSolve out;
    out.x = svd.solve(rhs);
    out.condition = smax / smin;
    return out;
}

namespace detail {

inline void materialize_fixed_rows_linear(const StructuralCausalModel& scm, LinearMechanism& mech,
                                          const std::set<int>& rows, const char* who) {
    for (int i : rows) {
        const auto& spec = scm.fixed_rows.at(i);
        if (!spec.is_point_mass())
            throw std::invalid_argument(std::string(who) + ": fixed row '" + scm.endo[i].name +
                                        "' carries a random value and cannot be folded");
        mech.b.segment(scm.endo[i].offset, scm.endo[i].dim) = spec.value();
    }
}

}  // namespace detail

// Rewrites each equation x_i = g(x_i, rest) solved for x_i: the diagonal
// blocks of A become zero while the solution set is unchanged.
inline StructuralCausalModel remove_self_loops_linear(const StructuralCausalModel& scm) {
    auto lin = detail::linear_view(scm);
    if (!lin) throw std::invalid_argument("remove_self_loops_linear: mechanism is not linear");
    const int n = scm.endo_dim();
    Matrix A = lin->A;
    Matrix G = lin->Gamma.cols() > 0 ? lin->Gamma : Matrix::Zero(n, 0);
    Vector b = lin->b.size() ? lin->b : Vector::Zero(n);

    for (std::size_t i = 0; i < scm.endo.size(); ++i) {
        if (scm.fixed_rows.count(static_cast<int>(i))) continue;
        const Block& blk = scm.endo[i];
        Matrix D = A.block(blk.offset, blk.offset, blk.dim, blk.dim);
        if (D.cwiseAbs().maxCoeff() <= kSparsityTol) continue;
        Matrix M = Matrix::Identity(blk.dim, blk.dim) - D;
        Eigen::FullPivLU<Matrix> lu(M);
        if (!lu.isInvertible())
            throw NoUniqueSolutionError("remove_self_loops_linear: cannot resolve the self-loop on '" + blk.name +
                                        "' (singular diagonal block)");
        Matrix Minv = lu.inverse();
        A.middleRows(blk.offset, blk.dim) = Minv * A.middleRows(blk.offset, blk.dim);
        A.block(blk.offset, blk.offset, blk.dim, blk.dim).setZero();
        if (G.cols() > 0) G.middleRows(blk.offset, blk.dim) = Minv * G.middleRows(blk.offset, blk.dim);
        b.segment(blk.offset, blk.dim) = Minv * b.segment(blk.offset, blk.dim);
    }

    StructuralCausalModel out = scm;
    out.mechanism = LinearMechanism{std::move(A), std::move(G), std::move(b)};
    return out;
}

// Eliminates the blocks in L by solving their subsystem and substituting into
// the remaining equations. The marginal model has the same solutions on the
// kept blocks, with bidirected structure preserved through shared exogenous
// terms.
inline StructuralCausalModel marginalize_linear(const StructuralCausalModel& scm, const std::set<int>& L) {
    for (int i : L)
        if (i < 0 || i >= static_cast<int>(scm.endo.size()))
            throw std::invalid_argument("marginalize_linear: block index out of range");
    if (L.empty()) return scm;
    auto lin = detail::linear_view(scm);
    if (!lin) throw std::invalid_argument("marginalize_linear: mechanism is not linear");

    const int n = scm.endo_dim();
    Matrix A = lin->A;
    Matrix G = lin->Gamma.cols() > 0 ? lin->Gamma : Matrix::Zero(n, 0);
    Vector b = lin->b.size() ? lin->b : Vector::Zero(n);

    // point-mass fixed rows inside L fold into constants; random ones cannot
    // be eliminated without changing the exogenous space
    std::set<int> fixed_in_L;
    for (int i : L)
        if (scm.fixed_rows.count(i)) fixed_in_L.insert(i);
    LinearMechanism tmp{A, G, b};
    detail::materialize_fixed_rows_linear(scm, tmp, fixed_in_L, "marginalize_linear");
    b = tmp.b;

    std::vector<int> lc, rc;  // coordinate indices
    std::vector<int> keep_blocks;
    for (std::size_t j = 0; j < scm.endo.size(); ++j) {
        const Block& blk = scm.endo[j];
        bool in_L = L.count(static_cast<int>(j)) > 0;
        for (int c = 0; c < blk.dim; ++c) (in_L ? lc : rc).push_back(blk.offset + c);
        if (!in_L) keep_blocks.push_back(static_cast<int>(j));
    }

    auto pick = [](const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
        Matrix out(rows.size(), cols.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
        return out;
    };
    auto pick_rows = [](const Matrix& m, const std::vector<int>& rows) {
        Matrix out(rows.size(), m.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = m.row(rows[r]);
        return out;
    };
    auto pick_vec = [](const Vector& v, const std::vector<int>& idx) {
        Vector out(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) out[r] = v[idx[r]];
        return out;
    };

    Matrix All = pick(A, lc, lc), Alr = pick(A, lc, rc), Arl = pick(A, rc, lc), Arr = pick(A, rc, rc);
    Matrix Gl = pick_rows(G, lc), Gr = pick_rows(G, rc);
    Vector bl = pick_vec(b, lc), br = pick_vec(b, rc);

    Matrix D = Matrix::Identity(lc.size(), lc.size()) - All;
    Eigen::FullPivLU<Matrix> lu(D);
    if (!lu.isInvertible())
        throw NoUniqueSolutionError("marginalize_linear: the eliminated subsystem is not uniquely solvable");
    Matrix M = lu.solve(Alr);
    Matrix N = lu.solve(Gl);
    Vector m = lu.solve(bl);

    StructuralCausalModel out;
    std::vector<Block> blocks;
    for (int j : keep_blocks) blocks.push_back({scm.endo[j].name, scm.endo[j].dim, 0});
    out.endo = layout_blocks(std::move(blocks));
    out.exo = scm.exo;
    out.exo_star = scm.exo_star;
    LinearMechanism mech;
    mech.A = Arr + Arl * M;
    mech.Gamma = Gr + Arl * N;
    mech.b = br + Arl * m;
    for (std::size_t newj = 0; newj < keep_blocks.size(); ++newj) {
        auto it = scm.fixed_rows.find(keep_blocks[newj]);
        if (it == scm.fixed_rows.end()) continue;
        out.fixed_rows.emplace(static_cast<int>(newj), it->second);
        const Block& blk = out.endo[newj];
        mech.A.middleRows(blk.offset, blk.dim).setZero();
        if (mech.Gamma.cols() > 0) mech.Gamma.middleRows(blk.offset, blk.dim).setZero();
        mech.b.segment(blk.offset, blk.dim).setZero();
    }
    out.mechanism = std::move(mech);
    return out;
}

// Functional graph of the causal mechanism; self-loops are genuine here (the
// equilibrium map reads each free block's own value). Fixed rows have no
// parents.
inline DirectedMixedGraph functional_graph_scm(const StructuralCausalModel& scm) {
    std::vector<std::string> names;
    for (const auto& blk : scm.endo) names.push_back(blk.name);
    DirectedMixedGraph g(names);

    std::vector<std::set<int>> endo_parents(scm.endo.size()), exo_parents(scm.endo.size());
    if (const auto* lin = std::get_if<LinearMechanism>(&scm.mechanism)) {
        auto block_nonzero = [](const Matrix& mm, const Block& row, const Block& col) {
            for (int r = 0; r < row.dim; ++r)
                for (int c = 0; c < col.dim; ++c)
                    if (std::abs(mm(row.offset + r, col.offset + c)) > kSparsityTol) return true;
            return false;
        };
        for (std::size_t j = 0; j < scm.endo.size(); ++j) {
            for (std::size_t i = 0; i < scm.endo.size(); ++i)
                if (block_nonzero(lin->A, scm.endo[j], scm.endo[i])) endo_parents[j].insert(static_cast<int>(i));
            for (std::size_t k = 0; k < scm.exo.size(); ++k)
                if (lin->Gamma.cols() > 0 && block_nonzero(lin->Gamma, scm.endo[j], scm.exo[k]))
                    exo_parents[j].insert(static_cast<int>(k));
        }
    } else if (const auto* fd = std::get_if<FromDynamicsMechanism>(&scm.mechanism)) {
        DependencyPattern pat = dependency_pattern(fd->dynamics, scm.endo, scm.exo);
        for (std::size_t j = 0; j < scm.endo.size(); ++j) {
            endo_parents[j] = pat.endo[j];
            endo_parents[j].insert(static_cast<int>(j));  // the x_j + F_j(x,e) form
            exo_parents[j] = pat.exo[j];
        }
    } else {
        const auto& cm = std::get<CustomMechanism>(scm.mechanism);
        if (cm.endo_parents.size() != scm.endo.size() || cm.exo_parents.size() != scm.endo.size())
            throw std::invalid_argument("functional_graph_scm: custom mechanism pattern size mismatch");
        endo_parents = cm.endo_parents;
        exo_parents = cm.exo_parents;
    }
    for (const auto& [i, spec] : scm.fixed_rows) {
        endo_parents[i].clear();
        exo_parents[i].clear();
    }

    for (std::size_t j = 0; j < scm.endo.size(); ++j)
        for (int i : endo_parents[j]) g.add_directed(scm.endo[i].name, scm.endo[j].name);
    for (std::size_t j1 = 0; j1 < scm.endo.size(); ++j1)
        for (std::size_t j2 = j1 + 1; j2 < scm.endo.size(); ++j2)
            for (int k : exo_parents[j1])
                if (exo_parents[j2].count(k)) {
                    g.add_bidirected(scm.endo[j1].name, scm.endo[j2].name);
                    break;
                }
    return g;
}

// ---- structural equality and the commutation check -------------------------

inline bool dynamics_structurally_equal(const DynamicsDescriptor& a, const DynamicsDescriptor& b) {
    if (a.index() != b.index()) return false;
    if (const auto* la = std::get_if<LinearDynamics>(&a)) {
        const auto& lb = std::get<LinearDynamics>(b);
        Vector da = la->drive.size() ? la->drive : Vector::Zero(la->B.rows());
        Vector db = lb.drive.size() ? lb.drive : Vector::Zero(lb.B.rows());
        return exact_equal(la->B, lb.B) && exact_equal(la->Gamma, lb.Gamma) && exact_equal(da, db);
    }
    if (const auto* ma = std::get_if<MassActionDynamics>(&a)) {
        const auto& mb = std::get<MassActionDynamics>(b);
        return ma->reactions == mb.reactions && exact_equal(ma->inflow, mb.inflow) &&
               exact_equal(ma->outflow, mb.outflow);
    }
    return false;  // custom: only probing can compare
}

struct ScmComparison {
    bool equal = true;
    bool mechanism_comparable = true;  // false when only probing applies
    std::vector<std::string> mismatches;
};

inline ScmComparison scm_structurally_equal(const StructuralCausalModel& a, const StructuralCausalModel& b) {
    ScmComparison cmp;
    auto fail = [&](const std::string& msg) {
        cmp.equal = false;
        cmp.mismatches.push_back(msg);
    };
    auto blocks_equal = [](const std::vector<Block>& x, const std::vector<Block>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].name != y[i].name || x[i].dim != y[i].dim) return false;
        return true;
    };
    if (!blocks_equal(a.endo, b.endo)) fail("endogenous index sets differ");
    if (!blocks_equal(a.exo, b.exo)) fail("exogenous index sets differ");
    if (!(a.exo_star == b.exo_star)) fail("exogenous limit variables differ");
    if (a.fixed_rows != b.fixed_rows) fail("fixed rows differ");
    if (a.mechanism.index() != b.mechanism.index()) {
        fail("mechanism kinds differ");
        return cmp;
    }
    if (const auto* la = std::get_if<LinearMechanism>(&a.mechanism)) {
        const auto& lb = std::get<LinearMechanism>(b.mechanism);
        if (!exact_equal(la->A, lb.A) || !exact_equal(la->Gamma, lb.Gamma) || !exact_equal(la->b, lb.b))
            fail("linear mechanisms differ");
    } else if (const auto* fa = std::get_if<FromDynamicsMechanism>(&a.mechanism)) {
        const auto& fb = std::get<FromDynamicsMechanism>(b.mechanism);
        if (fa->active != fb.active) fail("active row sets differ");
        if (std::holds_alternative<CustomDynamics>(fa->dynamics)) {
            cmp.mechanism_comparable = false;
        } else if (!dynamics_structurally_equal(fa->dynamics, fb.dynamics)) {
            fail("dynamics descriptors differ");
        }
    } else {
        cmp.mechanism_comparable = false;
    }
    return cmp;
}

struct CommuteReport {
    bool commutes = false;
    std::vector<std::string> mismatches;
    double max_probe_deviation = 0.0;
    int probes_run = 0;
};

// Builds the two routes around the intervention square - intervene the SCM
// with the limits of xi, and derive the SCM of the intervened model - and
// compares them structurally plus at random probe points per seed.
inline CommuteReport check_commute(const RandomDynamicalModel& rdm, const std::set<int>& I,
                                   const std::map<int, ProcessSpec>& xi, const std::vector<std::uint64_t>& seeds,
                                   int n_probes = 16, double tol = 1e-12) {
    for (const auto& [i, spec] : xi)
        if (!is_convergent(spec))
            throw std::invalid_argument("check_commute: intervention processes must be convergent");

    std::map<int, RandomVariableSpec> xi_limits;
    for (const auto& [i, spec] : xi) xi_limits.emplace(i, spec.limit_spec());

    const StructuralCausalModel via_scm = intervene_scm(scm_from_rdm(rdm), xi_limits);
    const StructuralCausalModel via_rdm = scm_from_rdm(intervene_rdm(rdm, I, xi));

    CommuteReport rep;
    ScmComparison cmp = scm_structurally_equal(via_scm, via_rdm);
    rep.mismatches = cmp.mismatches;

    const int dx = via_scm.endo_dim(), de = via_scm.exo_dim();
    bool probes_ok = true;
    for (std::uint64_t s : seeds) {
        FixedRowValues f1 = realize_fixed_rows(via_scm, s);
        FixedRowValues f2 = realize_fixed_rows(via_rdm, s);
        for (int p = 0; p < n_probes; ++p) {
            Rng rng(derive_seed(s, static_cast<std::uint64_t>(StreamSlot::Probe), p));
            Vector x(dx), e(de);
            for (int i = 0; i < dx; ++i) x[i] = rng.uniform(-3.0, 3.0);
            for (int i = 0; i < de; ++i) e[i] = rng.uniform(-3.0, 3.0);
            Vector v1 = scm_eval(via_scm, x, e, f1);
            Vector v2 = scm_eval(via_rdm, x, e, f2);
            double dev = (v1 - v2).cwiseAbs().maxCoeff();
            rep.max_probe_deviation = std::max(rep.max_probe_deviation, dev);
            ++rep.probes_run;
            if (dev > tol) probes_ok = false;
        }
    }
    if (!probes_ok) rep.mismatches.push_back("mechanism probe deviation exceeds tolerance");
    rep.commutes = cmp.equal && probes_ok;
    return rep;
}

// ---- pretty printing --------------------------------------------------------

inline std::string rv_spec_to_string(const RandomVariableSpec& rv) {
    std::ostringstream out;
    auto vec = [&](const Vector& v) {
        out << "[";
        for (int i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
        out << "]";
    };
    switch (rv.kind()) {
        case RandomVariableSpec::Kind::PointMass:
            vec(rv.value());
            break;
        case RandomVariableSpec::Kind::Normal:
            out << "Normal(mean=";
            vec(rv.mean());
            out << ", cov=...)";
            break;
        case RandomVariableSpec::Kind::UniformBox:
            out << "Uniform(";
            vec(rv.lower());
            out << ", ";
            vec(rv.upper());
            out << ")";
            break;
    }
    return out.str();
}

// Human-readable structural equations; exact for linear and mass-action
// mechanisms.
inline std::string pretty_print_scm(const StructuralCausalModel& scm) {
    std::ostringstream out;
    auto coord_names = [](const std::vector<Block>& blocks) {
        std::vector<std::string> names;
        for (const auto& blk : blocks)
            for (int c = 0; c < blk.dim; ++c)
                names.push_back(blk.dim == 1 ? blk.name : blk.name + "[" + std::to_string(c) + "]");
        return names;
    };
    const auto xn = coord_names(scm.endo), en = coord_names(scm.exo);

    auto coord_block = [&](int coord) {
        for (std::size_t j = 0; j < scm.endo.size(); ++j)
            if (coord >= scm.endo[j].offset && coord < scm.endo[j].offset + scm.endo[j].dim)
                return static_cast<int>(j);
        return -1;
    };

    auto print_linear_row = [&](int r, const Matrix& A, const Matrix& G, const Vector& b) {
        out << xn[r] << " = ";
        bool first = true;
        auto term = [&](double coef, const std::string& name) {
            if (std::abs(coef) <= kSparsityTol) return;
            if (first) {
                if (coef < 0) out << "-";
            } else {
                out << (coef < 0 ? " - " : " + ");
            }
            double a = std::abs(coef);
            if (name.empty()) {
                out << a;
            } else if (a == 1.0) {
                out << name;
            } else {
                out << a << "*" << name;
            }
            first = false;
        };
        for (int c = 0; c < A.cols(); ++c) term(A(r, c), xn[c]);
        for (int c = 0; c < G.cols(); ++c) term(G(r, c), en[c]);
        if (b.size() > 0) term(b[r], "");
        if (first) out << "0";
        out << "\n";
    };

    if (const auto* lin = std::get_if<LinearMechanism>(&scm.mechanism)) {
        Matrix G = lin->Gamma.cols() > 0 ? lin->Gamma : Matrix::Zero(scm.endo_dim(), 0);
        for (int r = 0; r < scm.endo_dim(); ++r) {
            int j = coord_block(r);
            if (scm.fixed_rows.count(j)) {
                if (r == scm.endo[j].offset) out << scm.endo[j].name << " = " << rv_spec_to_string(scm.fixed_rows.at(j)) << "\n";
                continue;
            }
            print_linear_row(r, lin->A, G, lin->b);
        }
        return out.str();
    }
    if (const auto* fd = std::get_if<FromDynamicsMechanism>(&scm.mechanism)) {
        if (const auto* ma = std::get_if<MassActionDynamics>(&fd->dynamics)) {
            for (std::size_t j = 0; j < scm.endo.size(); ++j) {
                if (scm.fixed_rows.count(static_cast<int>(j))) {
                    out << scm.endo[j].name << " = " << rv_spec_to_string(scm.fixed_rows.at(static_cast<int>(j)))
                        << "\n";
                    continue;
                }
                out << xn[j] << " = " << xn[j];
                int s = static_cast<int>(j);
                if (ma->inflow[s] != 0.0) out << " + " << ma->inflow[s];
                for (const auto& rx : ma->reactions) {
                    int net = 0;
                    for (const auto& [u, count] : rx.reactants)
                        if (u == s) net -= count;
                    for (const auto& [u, count] : rx.products)
                        if (u == s) net += count;
                    if (net == 0) continue;
                    double coef = rx.rate * net;
                    out << (coef < 0 ? " - " : " + ") << std::abs(coef);
                    for (const auto& [u, count] : rx.reactants)
                        for (int c = 0; c < count; ++c) out << "*" << xn[u];
                }
                if (ma->outflow[s] != 0.0) out << " - " << ma->outflow[s] << "*" << xn[s];
                out << "\n";
            }
            return out.str();
        }
        for (std::size_t j = 0; j < scm.endo.size(); ++j) {
            if (scm.fixed_rows.count(static_cast<int>(j)))
                out << scm.endo[j].name << " = " << rv_spec_to_string(scm.fixed_rows.at(static_cast<int>(j))) << "\n";
            else
                out << scm.endo[j].name << " = " << scm.endo[j].name << " + F_" << scm.endo[j].name << "(x, e)\n";
        }
        return out.str();
    }
    for (std::size_t j = 0; j < scm.endo.size(); ++j) {
        if (scm.fixed_rows.count(static_cast<int>(j)))
            out << scm.endo[j].name << " = " << rv_spec_to_string(scm.fixed_rows.at(static_cast<int>(j))) << "\n";
        else
            out << scm.endo[j].name << " = f_" << scm.endo[j].name << "(x, e)\n";
    }
    return out.str();
}

}  // namespace dyncausal
