#pragma once

#include "dyncausal/rng.hpp"
#include "dyncausal/types.hpp"

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dyncausal {

// F(x, e) = B x + Gamma e + drive. The drive vector holds fixed boundary
// terms (a constant exogenous input folded into the dynamics).
struct LinearDynamics {
    Matrix B;
    Matrix Gamma;
    Vector drive;
};

// One mass-action reaction: reactants -> products at the given rate constant.
// Entries are (species block index, stoichiometric count).
struct Reaction {
    std::vector<std::pair<int, int>> reactants;
    std::vector<std::pair<int, int>> products;
    double rate = 1.0;

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

// Mass-action network over scalar species blocks, with constant inflow and
// first-order outflow per species.
struct MassActionDynamics {
    std::vector<Reaction> reactions;
    Vector inflow;
    Vector outflow;
};

// Black-box dynamics with a declared dependency pattern (per output block,
// which endogenous/exogenous blocks it reads). The pattern is checked by
// finite-difference probing, not taken on trust.
struct CustomDynamics {
    std::function<Vector(const Vector&, const Vector&)> eval;
    std::vector<std::set<int>> endo_parents;
    std::vector<std::set<int>> exo_parents;
};

using DynamicsDescriptor = std::variant<LinearDynamics, MassActionDynamics, CustomDynamics>;

// Evaluates the full derivative vector (all endogenous blocks); callers pick
// the active rows.
inline Vector eval_dynamics(const DynamicsDescriptor& dyn, const Vector& x, const Vector& e) {
    if (const auto* lin = std::get_if<LinearDynamics>(&dyn)) {
        Vector out = lin->B * x;
        if (lin->Gamma.cols() > 0) out += lin->Gamma * e;
        if (lin->drive.size() > 0) out += lin->drive;
        return out;
    }
    if (const auto* ma = std::get_if<MassActionDynamics>(&dyn)) {
        Vector out = ma->inflow - ma->outflow.cwiseProduct(x);
        for (const auto& r : ma->reactions) {
            double flux = r.rate;
            for (const auto& [s, count] : r.reactants)
                for (int c = 0; c < count; ++c) flux *= x[s];
            for (const auto& [s, count] : r.reactants) out[s] -= flux * count;
            for (const auto& [s, count] : r.products) out[s] += flux * count;
        }
        return out;
    }
    return std::get<CustomDynamics>(dyn).eval(x, e);
}

inline void eval_dynamics_into(const DynamicsDescriptor& dyn, const Vector& x, const Vector& e, Vector& out) {
    if (const auto* lin = std::get_if<LinearDynamics>(&dyn)) {
        out.noalias() = lin->B * x;
        if (lin->Gamma.cols() > 0) out.noalias() += lin->Gamma * e;
        if (lin->drive.size() > 0) out += lin->drive;
        return;
    }
    out = eval_dynamics(dyn, x, e);
}

// Dependency pattern at block granularity: parents[j] = blocks the j-th
// output block reads.
struct DependencyPattern {
    std::vector<std::set<int>> endo;
    std::vector<std::set<int>> exo;
};

inline DependencyPattern dependency_pattern(const DynamicsDescriptor& dyn, const std::vector<Block>& endo,
                                            const std::vector<Block>& exo) {
    DependencyPattern pat;
    pat.endo.resize(endo.size());
    pat.exo.resize(endo.size());
    if (const auto* lin = std::get_if<LinearDynamics>(&dyn)) {
        auto block_nonzero = [](const Matrix& m, const Block& row, const Block& col) {
            for (int r = 0; r < row.dim; ++r)
                for (int c = 0; c < col.dim; ++c)
                    if (std::abs(m(row.offset + r, col.offset + c)) > kSparsityTol) return true;
            return false;
        };
        for (std::size_t j = 0; j < endo.size(); ++j) {
            for (std::size_t i = 0; i < endo.size(); ++i)
                if (block_nonzero(lin->B, endo[j], endo[i])) pat.endo[j].insert(static_cast<int>(i));
            for (std::size_t k = 0; k < exo.size(); ++k)
                if (lin->Gamma.cols() > 0 && block_nonzero(lin->Gamma, endo[j], exo[k]))
                    pat.exo[j].insert(static_cast<int>(k));
        }
        return pat;
    }
    if (const auto* ma = std::get_if<MassActionDynamics>(&dyn)) {
        for (std::size_t j = 0; j < endo.size(); ++j) {
            int s = static_cast<int>(j);
            if (std::abs(ma->outflow[s]) > kSparsityTol) pat.endo[j].insert(s);
            for (const auto& r : ma->reactions) {
                int net = 0;
                for (const auto& [u, count] : r.reactants)
                    if (u == s) net -= count;
                for (const auto& [u, count] : r.products)
                    if (u == s) net += count;
                if (net == 0) continue;
                for (const auto& [u, count] : r.reactants) pat.endo[j].insert(u);
            }
        }
        return pat;
    }
    const auto& cd = std::get<CustomDynamics>(dyn);
    if (cd.endo_parents.size() != endo.size() || cd.exo_parents.size() != endo.size())
        throw std::invalid_argument("custom dynamics: declared pattern size does not match block count");
    pat.endo = cd.endo_parents;
    pat.exo = cd.exo_parents;
    return pat;
}

// Probes the declared/derived dependency pattern by central finite
// differences at random points. A response above tol from a non-parent, or a
// declared parent that never responds, is reported as a mismatch.
struct DependencyCheck {
    bool ok = true;
    std::vector<std::string> mismatches;
};

inline DependencyCheck verify_dependencies(const DynamicsDescriptor& dyn, const std::vector<Block>& endo,
                                           const std::vector<Block>& exo, int n_points = 64,
                                           std::uint64_t seed = 17, double tol = 1e-7) {
    const DependencyPattern pat = dependency_pattern(dyn, endo, exo);
    const int dx = total_dim(endo), de = total_dim(exo);
    Rng rng(seed);
    const double h = 1e-4;

    std::vector<std::vector<char>> endo_hit(endo.size(), std::vector<char>(endo.size(), 0));
    std::vector<std::vector<char>> exo_hit(endo.size(), std::vector<char>(exo.size(), 0));
    DependencyCheck chk;

    auto out_block_delta = [&](const Vector& f1, const Vector& f2, const Block& b) {
        return (f1.segment(b.offset, b.dim) - f2.segment(b.offset, b.dim)).cwiseAbs().maxCoeff();
    };

    for (int p = 0; p < n_points; ++p) {
        Vector x(dx), e(de);
        for (int i = 0; i < dx; ++i) x[i] = rng.uniform(-2.0, 2.0);
        for (int i = 0; i < de; ++i) e[i] = rng.uniform(-2.0, 2.0);
        for (std::size_t i = 0; i < endo.size(); ++i) {
            for (int c = 0; c < endo[i].dim; ++c) {
                Vector xp = x, xm = x;
                xp[endo[i].offset + c] += h;
                xm[endo[i].offset + c] -= h;
                Vector fp = eval_dynamics(dyn, xp, e), fm = eval_dynamics(dyn, xm, e);
                for (std::size_t j = 0; j < endo.size(); ++j)
                    if (out_block_delta(fp, fm, endo[j]) > tol) endo_hit[j][i] = 1;
            }
        }
        for (std::size_t k = 0; k < exo.size(); ++k) {
            for (int c = 0; c < exo[k].dim; ++c) {
                Vector ep = e, em = e;
                ep[exo[k].offset + c] += h;
                em[exo[k].offset + c] -= h;
                Vector fp = eval_dynamics(dyn, x, ep), fm = eval_dynamics(dyn, x, em);
                for (std::size_t j = 0; j < endo.size(); ++j)
                    if (out_block_delta(fp, fm, endo[j]) > tol) exo_hit[j][k] = 1;
            }
        }
    }

    for (std::size_t j = 0; j < endo.size(); ++j) {
        for (std::size_t i = 0; i < endo.size(); ++i) {
            bool declared = pat.endo[j].count(static_cast<int>(i)) > 0;
            if (endo_hit[j][i] && !declared)
                chk.mismatches.push_back("output '" + endo[j].name + "' responds to undeclared input '" +
                                         endo[i].name + "'");
            if (!endo_hit[j][i] && declared)
                chk.mismatches.push_back("output '" + endo[j].name + "' never responds to declared input '" +
                                         endo[i].name + "'");
        }
        for (std::size_t k = 0; k < exo.size(); ++k) {
            bool declared = pat.exo[j].count(static_cast<int>(k)) > 0;
            if (exo_hit[j][k] && !declared)
                chk.mismatches.push_back("output '" + endo[j].name + "' responds to undeclared exogenous '" +
                                         exo[k].name + "'");
            if (!exo_hit[j][k] && declared)
                chk.mismatches.push_back("output '" + endo[j].name + "' never responds to declared exogenous '" +
                                         exo[k].name + "'");
        }
    }
    chk.ok = chk.mismatches.empty();
    return chk;
}

}  // namespace dyncausal
