#pragma once

#include "dyncausal/scm.hpp"
#include "dyncausal/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyncausal {

// ---- basic enzyme reaction --------------------------------------------------
//
// Species S (substrate), E (enzyme), C (complex), P (product) with
//   E + S -> C   (rate kf)
//   C -> E + S   (rate kr)
//   C -> E + P   (rate kc)
// plus constant substrate inflow ki and first-order product outflow ko:
//   dS/dt = ki - kf E S + kr C
//   dE/dt = -kf E S + (kr + kc) C
//   dC/dt =  kf E S - (kr + kc) C
//   dP/dt =  kc C - ko P
struct EnzymeRates {
    double ki = 0.5;
    double kf = 1.1;
    double kr = 0.9;
    double kc = 1.6;
    double ko = 0.6;
};

inline RandomDynamicalModel make_enzyme_rdm(const EnzymeRates& r = {}) {
    RandomDynamicalModel rdm;
    rdm.endo = layout_blocks({{"S", 1, 0}, {"E", 1, 0}, {"C", 1, 0}, {"P", 1, 0}});
    const int S = 0, E = 1, C = 2, P = 3;
    MassActionDynamics ma;
    ma.reactions.push_back({{{E, 1}, {S, 1}}, {{C, 1}}, r.kf});
    ma.reactions.push_back({{{C, 1}}, {{E, 1}, {S, 1}}, r.kr});
    ma.reactions.push_back({{{C, 1}}, {{E, 1}, {P, 1}}, r.kc});
    ma.inflow = Vector::Zero(4);
    ma.inflow[S] = r.ki;
    ma.outflow = Vector::Zero(4);
    ma.outflow[P] = r.ko;
    rdm.dynamics = std::move(ma);
    rdm.validate();
    return rdm;
}

// The enzyme equilibrium equations solved for each variable (no self-loops):
//   S = (ki + kr C) / (kf E)
//   E = (kr + kc) C / (kf S)
//   C = kf E S / (kr + kc)
//   P = kc C / ko
// Same solution set as the x + F(x) mechanism wherever S, E != 0.
inline StructuralCausalModel make_enzyme_loop_free_scm(const EnzymeRates& r = {}) {
    StructuralCausalModel scm;
    scm.endo = layout_blocks({{"S", 1, 0}, {"E", 1, 0}, {"C", 1, 0}, {"P", 1, 0}});
    CustomMechanism mech;
    mech.eval = [r](const Vector& x, const Vector&) {
        const double S = x[0], E = x[1], C = x[2];
        Vector f(4);
        f[0] = (r.ki + r.kr * C) / (r.kf * E);
        f[1] = (r.kr + r.kc) * C / (r.kf * S);
        f[2] = r.kf * E * S / (r.kr + r.kc);
        f[3] = r.kc * C / r.ko;
        return f;
    };
    mech.endo_parents = {{1, 2}, {0, 2}, {0, 1}, {2}};
    mech.exo_parents = {{}, {}, {}, {}};
    scm.mechanism = std::move(mech);
    return scm;
}

// ---- damped coupled spring chain ---------------------------------------------
//
// d point masses on a line between walls at 0 and L, joined by d+1 springs
// with constants k_0..k_d and natural lengths l_0..l_d (the lengths are the
// exogenous inputs). Equations of motion:
//   dP_i/dt = k_i (Q_{i+1} - Q_i - l_i) - k_{i-1} (Q_i - Q_{i-1} - l_{i-1}) - (b_i/m_i) P_i
//   dQ_i/dt = P_i / m_i
// with Q_0 = 0 and Q_{d+1} = L fixed; the k_d L wall term sits in the drive
// vector. State order: Q1..Qd, P1..Pd; exogenous order: l0..ld.
struct OscillatorParams {
    int d = 5;
    std::vector<double> k;  // d+1 spring constants
    std::vector<double> b;  // d friction coefficients
    std::vector<double> m;  // d masses
    double L = 6.0;
    std::vector<RandomVariableSpec> lengths;  // d+1 scalar specs; defaults to point mass L/(d+1)

    static OscillatorParams symmetric(int d = 5, double k = 1.0, double b = 1.0, double m = 1.0, double L = 6.0) {
        OscillatorParams p;
        p.d = d;
        p.k.assign(d + 1, k);
        p.b.assign(d, b);
        p.m.assign(d, m);
        p.L = L;
        return p;
    }

    void set_lengths_point_mass(double value) {
        lengths.clear();
        for (int i = 0; i <= d; ++i) lengths.push_back(RandomVariableSpec::point_mass(Vector::Constant(1, value)));
    }
    void set_lengths_normal(double mean, double stddev) {
        lengths.clear();
        for (int i = 0; i <= d; ++i) lengths.push_back(RandomVariableSpec::normal(mean, stddev));
    }
};

inline RandomDynamicalModel make_oscillator_rdm(OscillatorParams p) {
    if (p.d < 1) throw std::invalid_argument("oscillator: need at least one mass");
    if (static_cast<int>(p.k.size()) != p.d + 1) throw std::invalid_argument("oscillator: need d+1 spring constants");
    if (static_cast<int>(p.b.size()) != p.d || static_cast<int>(p.m.size()) != p.d)
        throw std::invalid_argument("oscillator: need d frictions and d masses");
    if (p.lengths.empty()) {
        for (int i = 0; i <= p.d; ++i)
            p.lengths.push_back(RandomVariableSpec::point_mass(Vector::Constant(1, p.L / (p.d + 1))));
    }
    if (static_cast<int>(p.lengths.size()) != p.d + 1)
        throw std::invalid_argument("oscillator: need d+1 spring length specs");

    RandomDynamicalModel rdm;
    std::vector<Block> endo, exo;
    for (int i = 1; i <= p.d; ++i) endo.push_back({"Q" + std::to_string(i), 1, 0});
    for (int i = 1; i <= p.d; ++i) endo.push_back({"P" + std::to_string(i), 1, 0});
    for (int i = 0; i <= p.d; ++i) exo.push_back({"l" + std::to_string(i), 1, 0});
    rdm.endo = layout_blocks(std::move(endo));
    rdm.exo = layout_blocks(std::move(exo));

    const int n = 2 * p.d;
    Matrix B = Matrix::Zero(n, n);
    Matrix G = Matrix::Zero(n, p.d + 1);
    Vector drive = Vector::Zero(n);
    auto q = [&](int i) { return i - 1; };          // Q_i coordinate
    auto pp = [&](int i) { return p.d + i - 1; };   // P_i coordinate
    for (int i = 1; i <= p.d; ++i) {
        B(q(i), pp(i)) = 1.0 / p.m[i - 1];
        const double ki = p.k[i], kim1 = p.k[i - 1];
        B(pp(i), q(i)) += -ki - kim1;
        if (i < p.d)
            B(pp(i), q(i + 1)) += ki;
        else
            drive[pp(i)] += ki * p.L;  // right wall Q_{d+1} = L
        if (i > 1) B(pp(i), q(i - 1)) += kim1;  // left wall Q_0 = 0 contributes nothing
        B(pp(i), pp(i)) = -p.b[i - 1] / p.m[i - 1];
        G(pp(i), i) = -ki;
        G(pp(i), i - 1) = kim1;
    }

    rdm.dynamics = LinearDynamics{std::move(B), std::move(G), std::move(drive)};
    for (int i = 0; i <= p.d; ++i) rdm.exogenous_processes.push_back(ProcessSpec::constant(p.lengths[i]));
    rdm.validate();
    return rdm;
}

// Default initial box for the spring chain: positions uniform in [0, L],
// momenta uniform in [-1, 1]; intervened coordinates pinned to their process
// value at t0.
inline InitialCondition oscillator_default_init(const RandomDynamicalModel& rdm, double L, double t0 = 0.0) {
    const int n = rdm.endo_dim();
    Vector lo(n), hi(n);
    for (std::size_t j = 0; j < rdm.endo.size(); ++j) {
        const Block& blk = rdm.endo[j];
        bool is_q = blk.name.size() > 1 && blk.name[0] == 'Q';
        for (int c = 0; c < blk.dim; ++c) {
            lo[blk.offset + c] = is_q ? 0.0 : -1.0;
            hi[blk.offset + c] = is_q ? L : 1.0;
        }
    }
    for (const auto& [k, spec] : rdm.intervened_processes) {
        // any seed: the t0 value of the offered variants is deterministic only
        // for point-mass starts, which is what the bundled scenarios use
        Vector v0 = RealizedProcess(spec, 0).at(t0);
        const Block& blk = rdm.endo[k];
        lo.segment(blk.offset, blk.dim) = v0;
        hi.segment(blk.offset, blk.dim) = v0;
    }
    return InitialCondition{t0, RandomVariableSpec::uniform_box(lo, hi)};
}

}  // namespace dyncausal
