#include "dyncausal/scm.hpp"

#include "dyncausal/presets.hpp"
#include "dyncausal/simulate.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dyncausal;

namespace {

ProcessSpec pin(double v) { return ProcessSpec::constant_value(Vector::Constant(1, v)); }

RandomDynamicalModel contractive_linear() {
    Matrix B(3, 3);
    B << -1.0, 0.3, 0.0,
          0.2, -1.5, 0.4,
          0.0, 0.1, -0.8;
    Matrix G(3, 2);
    G << 1.0, 0.0,
         0.5, 0.5,
         0.0, 1.0;
    std::vector<ProcessSpec> exo = {ProcessSpec::constant(RandomVariableSpec::normal(0.3, 0.2)),
                                    ProcessSpec::constant(RandomVariableSpec::normal(-0.1, 0.1))};
    return make_linear_rdm(B, G, exo);
}

StepControl rk45(double t_end, double rel = 1e-9, double abs = 1e-11, double max_step = 1.0) {
    StepControl ctrl;
    ctrl.method = StepControl::Rk45Adaptive{rel, abs, max_step};
    ctrl.t_end = t_end;
    return ctrl;
}

OscillatorParams chain_params() {
    auto p = OscillatorParams::symmetric();
    p.set_lengths_normal(1.0, 0.1);
    return p;
}

Vector enzyme_solution(double s_star) {
    // zero of the rate equations with substrate pinned at s_star:
    // C = ki/kc, P = ki/ko, E S = (kr+kc) C / kf
    const EnzymeRates r;
    Vector x(4);
    double c = r.ki / r.kc;
    x << s_star, (r.kr + r.kc) * c / (r.kf * s_star), c, r.ki / r.ko;
    return x;
}

}  // namespace

TEST_CASE("the equilibrium map of a linear model is A = I + B with the same Gamma") {
    auto rdm = contractive_linear();
    auto scm = scm_from_rdm(rdm);
    const auto& lin = std::get<LinearMechanism>(scm.mechanism);
    const auto& dyn = std::get<LinearDynamics>(rdm.dynamics);
    REQUIRE(exact_equal(lin.A, (Matrix::Identity(3, 3) + dyn.B).eval()));
    REQUIRE(exact_equal(lin.Gamma, dyn.Gamma));
    REQUIRE(scm.fixed_rows.empty());
    REQUIRE(scm.exo_star.size() == 2);
}

TEST_CASE("residual vanishes exactly at fixed points and measures defects elsewhere") {
    // A = 0, Gamma = I: f(x,e) = e, so residual(x,e) = ||x - e||
    StructuralCausalModel scm;
    scm.endo = layout_blocks({{"x1", 1, 0}, {"x2", 1, 0}});
    scm.exo = layout_blocks({{"e1", 1, 0}, {"e2", 1, 0}});
    scm.mechanism = LinearMechanism{Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)};
    scm.exo_star = {RandomVariableSpec::point_mass(0.0), RandomVariableSpec::point_mass(0.0)};
    Vector e(2);
    e << 1.0, -2.0;
    REQUIRE(residual(scm, e, e) == 0.0);
    Vector x(2);
    x << 4.0, 2.0;
    REQUIRE(residual(scm, x, e) == Catch::Approx(5.0));
}

TEST_CASE("enzyme equilibrium algebra satisfies the structural equations") {
    auto scm = scm_from_rdm(make_enzyme_rdm());
    Vector x = enzyme_solution(1.0);
    REQUIRE(residual(scm, x, Vector{}) < 1e-12);
    Vector x2 = enzyme_solution(0.37);
    REQUIRE(residual(scm, x2, Vector{}) < 1e-12);
    // off-manifold point has a visible defect
    x2[2] += 0.01;
    REQUIRE(residual(scm, x2, Vector{}) > 1e-3);
}

TEST_CASE("solve_linear_scm inverts I - A and reports conditioning") {
    // A = 0: x = Gamma e + b
    StructuralCausalModel scm;
    scm.endo = layout_blocks({{"x1", 1, 0}, {"x2", 1, 0}});
    scm.exo = layout_blocks({{"e", 1, 0}});
    Matrix G(2, 1);
    G << 2.0, -1.0;
    Vector b(2);
    b << 0.5, 0.0;
    scm.mechanism = LinearMechanism{Matrix::Zero(2, 2), G, b};
    scm.exo_star = {RandomVariableSpec::point_mass(0.0)};
    auto sol = solve_linear_scm(scm, Vector::Constant(1, 3.0));
    REQUIRE(sol.x[0] == Catch::Approx(6.5));
    REQUIRE(sol.x[1] == Catch::Approx(-3.0));
    REQUIRE(sol.condition == Catch::Approx(1.0));
}

TEST_CASE("solving the enzyme equilibrium map reports non-unique solvability") {
    auto scm = scm_from_rdm(make_enzyme_rdm());
    REQUIRE_THROWS_AS(solve_linear_scm(scm, Vector{}), NoUniqueSolutionError);
}

TEST_CASE("solve residual stays within the advertised bound") {
    auto rdm = contractive_linear();
    auto scm = scm_from_rdm(rdm);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Rng rng(seed);
        Vector e(2);
        e << rng.uniform(-1, 1), rng.uniform(-1, 1);
        auto sol = solve_linear_scm(scm, e);
        REQUIRE(residual(scm, sol.x, e) <= 1e-10 * (1.0 + sol.x.norm()));
    }
}

TEST_CASE("empty interventions and disjoint commutation on the SCM") {
    auto scm = scm_from_rdm(contractive_linear());
    auto same = intervene_scm(scm, std::set<int>{}, Vector{});
    REQUIRE(scm_structurally_equal(scm, same).equal);
    auto ab = intervene_scm(intervene_scm(scm, "x1", 1.0), "x2", 2.0);
    auto ba = intervene_scm(intervene_scm(scm, "x2", 2.0), "x1", 1.0);
    REQUIRE(scm_structurally_equal(ab, ba).equal);
    REQUIRE_THROWS_AS(intervene_scm(scm, std::set<int>{9}, Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("product row is unaffected by a substrate intervention once the complex is pinned") {
    auto scm = scm_from_rdm(make_enzyme_rdm());
    const double c = 0.3125;
    auto do_c = intervene_scm(scm, "C", c);
    for (double s : {0.5, 1.0, 2.0}) {
        auto do_cs = intervene_scm(do_c, "S", s);
        // the P row is x_P + kc C - ko P; at the solution it forces P = kc c / ko
        Vector x(4);
        x << s, 1.0, c, 1.6 * c / 0.6;
        Vector f = scm_eval(do_cs, x, Vector{}, FixedRowValues{{0, Vector::Constant(1, s)},
                                                               {2, Vector::Constant(1, c)}});
        REQUIRE(f[3] == Catch::Approx(1.6 * c / 0.6));
        REQUIRE(f[0] == s);
        REQUIRE(f[2] == c);
    }
}

TEST_CASE("already loop-free linear models pass through self-loop removal unchanged") {
    StructuralCausalModel scm;
    scm.endo = layout_blocks({{"x1", 1, 0}, {"x2", 1, 0}});
    scm.exo = layout_blocks({{"e", 1, 0}});
    Matrix A(2, 2);
    A << 0.0, 0.5, 0.3, 0.0;
    Matrix G(2, 1);
    G << 1.0, 0.0;
    scm.mechanism = LinearMechanism{A, G, Vector::Zero(2)};
    scm.exo_star = {RandomVariableSpec::point_mass(0.0)};
    auto out = remove_self_loops_linear(scm);
    REQUIRE(scm_structurally_equal(scm, out).equal);
}

TEST_CASE("self-loop removal preserves the solution set") {
    auto scm = scm_from_rdm(contractive_linear());  // A = I + B has self-loops
    auto loop_free = remove_self_loops_linear(scm);
    const auto& lin = std::get<LinearMechanism>(loop_free.mechanism);
    for (int i = 0; i < 3; ++i) REQUIRE(std::abs(lin.A(i, i)) <= kSparsityTol);
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        Rng rng(seed);
        Vector e(2);
        e << rng.uniform(-1, 1), rng.uniform(-1, 1);
        auto a = solve_linear_scm(scm, e);
        auto b = solve_linear_scm(loop_free, e);
        REQUIRE((a.x - b.x).norm() < 1e-10);
    }
}

TEST_CASE("a unit self-loop cannot be resolved") {
    StructuralCausalModel scm;
    scm.endo = layout_blocks({{"x", 1, 0}});
    Matrix A(1, 1);
    A << 1.0;  // x = x + c has no unique rewrite
    scm.mechanism = LinearMechanism{A, Matrix::Zero(1, 0), Vector::Constant(1, 1.0)};
    REQUIRE_THROWS_AS(remove_self_loops_linear(scm), NoUniqueSolutionError);
}

TEST_CASE("marginalizing nothing is the identity") {
    auto scm = scm_from_rdm(contractive_linear());
    auto out = marginalize_linear(scm, {});
    REQUIRE(scm_structurally_equal(scm, out).equal);
}

TEST_CASE("eliminating the momenta of the spring chain gives the position-only model") {
    auto rdm = make_oscillator_rdm(chain_params());
    auto scm = scm_from_rdm(rdm);
    std::set<int> momenta;
    for (int i = 1; i <= 5; ++i) momenta.insert(find_block(scm.endo, "P" + std::to_string(i)));
    auto marginal = marginalize_linear(scm, momenta);
    REQUIRE(marginal.endo.size() == 5);

    // marginal rows: Q_i = Q_i + (k_i/b_i)(Q_{i+1} - Q_i - l_i) - (k_{i-1}/b_i)(Q_i - Q_{i-1} - l_{i-1})
    const auto& lin = std::get<LinearMechanism>(marginal.mechanism);
    const double k = 1.0, b = 1.0;
    for (int i = 1; i <= 5; ++i) {
        int r = find_block(marginal.endo, "Q" + std::to_string(i));
        REQUIRE(lin.A(r, r) == Catch::Approx(1.0 - 2.0 * k / b));
        if (i < 5) REQUIRE(lin.A(r, find_block(marginal.endo, "Q" + std::to_string(i + 1))) == Catch::Approx(k / b));
        if (i > 1) REQUIRE(lin.A(r, find_block(marginal.endo, "Q" + std::to_string(i - 1))) == Catch::Approx(k / b));
        REQUIRE(lin.Gamma(r, i) == Catch::Approx(-k / b));
        REQUIRE(lin.Gamma(r, i - 1) == Catch::Approx(k / b));
    }

    // solution-set preservation on random exogenous draws
    for (std::uint64_t seed : {5ull, 6ull}) {
        Rng rng(seed);
        Vector e(6);
        for (int i = 0; i < 6; ++i) e[i] = 0.9 + 0.2 * rng.uniform01();
        auto full = solve_linear_scm(scm, e);
        auto marg = solve_linear_scm(marginal, e);
        for (int i = 1; i <= 5; ++i) {
            int qf = find_block(scm.endo, "Q" + std::to_string(i));
            int qm = find_block(marginal.endo, "Q" + std::to_string(i));
            REQUIRE(std::abs(full.x[scm.endo[qf].offset] - marg.x[marginal.endo[qm].offset]) < 1e-10);
        }
        // augmenting the marginal solution with vanished momenta solves the full model
        Vector full_x(10);
        for (int i = 1; i <= 5; ++i) {
            full_x[find_block(scm.endo, "Q" + std::to_string(i))] = marg.x[i - 1];
            full_x[find_block(scm.endo, "P" + std::to_string(i))] = 0.0;
        }
        REQUIRE(residual(scm, full_x, e) < 1e-10);
    }
}

TEST_CASE("resolved position chain matches the closed-form spring balance") {
    // Q_i = (k_i (Q_{i+1} - l_i) + k_{i-1} (Q_{i-1} + l_{i-1})) / (k_i + k_{i-1})
    auto rdm = make_oscillator_rdm(chain_params());
    auto scm = scm_from_rdm(rdm);
    std::set<int> momenta;
    for (int i = 1; i <= 5; ++i) momenta.insert(find_block(scm.endo, "P" + std::to_string(i)));
    auto resolved = remove_self_loops_linear(marginalize_linear(scm, momenta));
    const auto& lin = std::get<LinearMechanism>(resolved.mechanism);
    const double k = 1.0;
    for (int i = 1; i <= 5; ++i) {
        int r = i - 1;
        REQUIRE(std::abs(lin.A(r, r)) <= kSparsityTol);
        double den = 2.0 * k;
        if (i < 5) REQUIRE(lin.A(r, i) == Catch::Approx(k / den).margin(1e-12));
        if (i > 1) REQUIRE(lin.A(r, i - 2) == Catch::Approx(k / den).margin(1e-12));
        REQUIRE(lin.Gamma(r, i) == Catch::Approx(-k / den).margin(1e-12));
        REQUIRE(lin.Gamma(r, i - 1) == Catch::Approx(k / den).margin(1e-12));
        if (i == 5) REQUIRE(lin.b(r) == Catch::Approx(6.0 * k / den).margin(1e-12));
    }

    // with unit lengths the masses sit at integer positions
    auto sol = solve_linear_scm(resolved, Vector::Ones(6));
    for (int i = 1; i <= 5; ++i) REQUIRE(sol.x[i - 1] == Catch::Approx(double(i)).margin(1e-10));
}

TEST_CASE("marginalization refuses a non-solvable subsystem") {
    StructuralCausalModel scm;
    scm.endo = layout_blocks({{"x", 1, 0}, {"y", 1, 0}});
    Matrix A(2, 2);
    A << 1.0, 0.5, 0.2, 0.0;  // x-row: x = x + 0.5 y, not solvable for x
    scm.mechanism = LinearMechanism{A, Matrix::Zero(2, 0), Vector::Zero(2)};
    REQUIRE_THROWS_AS(marginalize_linear(scm, {0}), NoUniqueSolutionError);
}

TEST_CASE("equilibrium-map graphs carry self-loops; the chain loses them after resolution") {
    auto rdm = make_oscillator_rdm(chain_params());
    auto scm = scm_from_rdm(rdm);
    auto g = functional_graph_scm(scm);
    // every Q row keeps a self-loop (Q = Q + P/m); P rows lose theirs only if 1 - b/m = 0,
    // which holds for the symmetric parameters here
    for (int i = 1; i <= 5; ++i) {
        REQUIRE(g.has_directed("Q" + std::to_string(i), "Q" + std::to_string(i)));
        REQUIRE_FALSE(g.has_directed("P" + std::to_string(i), "P" + std::to_string(i)));
    }

    std::set<int> momenta;
    for (int i = 1; i <= 5; ++i) momenta.insert(find_block(scm.endo, "P" + std::to_string(i)));
    auto resolved = remove_self_loops_linear(marginalize_linear(scm, momenta));
    auto gr = functional_graph_scm(resolved);
    REQUIRE_FALSE(gr.has_self_loop());
    DirectedMixedGraph expected({"Q1", "Q2", "Q3", "Q4", "Q5"});
    for (int i = 1; i <= 4; ++i) {
        std::string a = "Q" + std::to_string(i), bname = "Q" + std::to_string(i + 1);
        expected.add_directed(a, bname);
        expected.add_directed(bname, a);
        expected.add_bidirected(a, bname);
    }
    REQUIRE(graph_equal(gr, expected));

    auto intervened = intervene_scm(resolved, "Q3", 2.0);
    auto gi = functional_graph_scm(intervened);
    DirectedMixedGraph expected_i({"Q1", "Q2", "Q3", "Q4", "Q5"});
    expected_i.add_directed("Q1", "Q2");
    expected_i.add_directed("Q2", "Q1");
    expected_i.add_directed("Q3", "Q2");
    expected_i.add_directed("Q3", "Q4");
    expected_i.add_directed("Q4", "Q5");
    expected_i.add_directed("Q5", "Q4");
    expected_i.add_bidirected("Q1", "Q2");
    expected_i.add_bidirected("Q4", "Q5");
    REQUIRE(graph_equal(gi, expected_i));
}

TEST_CASE("graph-level intervention consistency on the equilibrium map") {
    auto scm = scm_from_rdm(contractive_linear());
    auto g0 = functional_graph_scm(scm);
    auto g1 = functional_graph_scm(intervene_scm(scm, "x2", 0.0));
    for (const auto& [i, j] : g1.directed_edges()) REQUIRE(g1.nodes()[j] != "x2");
    for (const auto& [i, j] : g0.directed_edges())
        if (g0.nodes()[j] != "x2") REQUIRE(g1.has_directed(g0.nodes()[i], g0.nodes()[j]));
}

TEST_CASE("the loop-free enzyme equations have the same solution set as the equilibrium map") {
    auto loop_free = make_enzyme_loop_free_scm();
    auto from_rdm = scm_from_rdm(make_enzyme_rdm());
    auto g = functional_graph_scm(loop_free);
    REQUIRE_FALSE(g.has_self_loop());
    // points on the equilibrium manifold solve both systems
    for (double s : {0.4, 0.9, 1.7}) {
        Vector x = enzyme_solution(s);
        REQUIRE(residual(loop_free, x, Vector{}) < 1e-12);
        REQUIRE(residual(from_rdm, x, Vector{}) < 1e-12);
    }
    // random off-manifold points solve neither
    Rng rng(123);
    for (int rep = 0; rep < 32; ++rep) {
        Vector x(4);
        for (int i = 0; i < 4; ++i) x[i] = 0.2 + 2.0 * rng.uniform01();
        double r1 = residual(loop_free, x, Vector{});
        double r2 = residual(from_rdm, x, Vector{});
        REQUIRE((r1 < 1e-9) == (r2 < 1e-9));
    }
}

TEST_CASE("enzyme graphs under interventions on the loop-free equations") {
    auto loop_free = make_enzyme_loop_free_scm();
    auto do_c = intervene_scm(loop_free, "C", 0.3125);
    DirectedMixedGraph expected({"S", "E", "C", "P"});
    expected.add_directed("E", "S");
    expected.add_directed("S", "E");
    expected.add_directed("C", "S");
    expected.add_directed("C", "E");
    expected.add_directed("C", "P");
    REQUIRE(graph_equal(functional_graph_scm(do_c), expected));

    auto do_cs = intervene_scm(do_c, "S", 1.0);
    DirectedMixedGraph expected2({"S", "E", "C", "P"});
    expected2.add_directed("S", "E");
    expected2.add_directed("C", "E");
    expected2.add_directed("C", "P");
    REQUIRE(graph_equal(functional_graph_scm(do_cs), expected2));
}

TEST_CASE("equilibrated paths of a steady model solve its equilibrium map") {
    auto rdm = contractive_linear();
    auto scm = scm_from_rdm(rdm);
    Vector lo = Vector::Constant(3, -1.0), hi = Vector::Constant(3, 1.0);
    InitialCondition init{0.0, RandomVariableSpec::uniform_box(lo, hi)};
    DetectionParams det;
    auto res = run_ensemble(rdm, init, rk45(40.0), 24, 4242, det);
    REQUIRE(res.n_equilibrated == 24);
    const double eps_accept = 10.0 * (det.eps_drift + det.eps_deriv);
    for (const auto& rec : res.paths) {
        REQUIRE(residual(scm, *rec.status.x_star, rec.e_star, rec.seed) <= eps_accept);
        // and the linear solve lands on the same point
        auto sol = solve_linear_scm(scm, rec.e_star, rec.seed);
        REQUIRE((sol.x - *rec.status.x_star).norm() < 1e-6);
    }
}

TEST_CASE("replaying an equilibrium solution as the initial state stays constant") {
    auto rdm = contractive_linear();
    auto scm = scm_from_rdm(rdm);
    for (int p = 0; p < 5; ++p) {
        std::uint64_t seed = derive_seed(909, p);
        RealizedModel rm = realize_model(rdm, seed);
        Vector e = rm.exo_limit(rdm.exo_dim(), rdm.exo);
        auto sol = solve_linear_scm(scm, e, seed);
        InitialCondition init{0.0, RandomVariableSpec::point_mass(sol.x)};
        Trajectory tr = integrate_path(rdm, init, rk45(50.0), seed);
        double drift = 0.0;
        for (int i = 0; i < tr.times.size(); ++i)
            drift = std::max(drift, (tr.values.row(i).transpose() - sol.x).norm());
        REQUIRE(drift < 1e-8);
    }
}

TEST_CASE("intervention commutes with the equilibrium-map construction") {
    // chain with a ramped position intervention
    auto rdm = make_oscillator_rdm(chain_params());
    int q3 = find_block(rdm.endo, "Q3");
    std::map<int, ProcessSpec> xi = {{q3, ProcessSpec::ramp_to(RandomVariableSpec::point_mass(2.0), 1.0)}};
    auto rep = check_commute(rdm, {q3}, xi, {1, 2, 3});
    REQUIRE(rep.commutes);
    REQUIRE(rep.max_probe_deviation <= 1e-12);

    // enzyme with any convergent process on the complex
    auto enzyme = make_enzyme_rdm();
    int c = find_block(enzyme.endo, "C");
    std::map<int, ProcessSpec> xi2 = {{c, ProcessSpec::exp_transient(RandomVariableSpec::point_mass(0.3125),
                                                                     RandomVariableSpec::point_mass(0.4), 2.0)}};
    REQUIRE(check_commute(enzyme, {c}, xi2, {7, 8}).commutes);

    // trivially on the empty set
    REQUIRE(check_commute(enzyme, {}, {}, {1}).commutes);
}

TEST_CASE("commutation holds for random linear models and random convergent processes") {
    Rng rng(60606);
    for (int rep = 0; rep < 25; ++rep) {
        int n = 2 + static_cast<int>(rng.uniform01() * 3);
        int m = 1 + static_cast<int>(rng.uniform01() * 2);
        Matrix B(n, n), G(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B(i, j) = (rng.uniform01() < 0.5 ? 0.0 : rng.uniform(-1.0, 1.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) G(i, j) = (rng.uniform01() < 0.5 ? 0.0 : rng.uniform(-1.0, 1.0));
        std::vector<ProcessSpec> exo;
        for (int j = 0; j < m; ++j)
            exo.push_back(ProcessSpec::constant(RandomVariableSpec::normal(rng.uniform(-1, 1), 0.5)));
        auto rdm = make_linear_rdm(B, G, exo);

        std::set<int> I;
        std::map<int, ProcessSpec> xi;
        for (int i = 0; i < n; ++i) {
            if (rng.uniform01() < 0.4) {
                I.insert(i);
                double lim = rng.uniform(-2, 2);
                switch (static_cast<int>(rng.uniform01() * 3)) {
                    case 0:
                        xi.emplace(i, pin(lim));
                        break;
                    case 1:
                        xi.emplace(i, ProcessSpec::exp_transient(RandomVariableSpec::point_mass(lim),
                                                                 RandomVariableSpec::point_mass(1.0),
                                                                 0.5 + rng.uniform01()));
                        break;
                    default:
                        xi.emplace(i, ProcessSpec::ramp_to(RandomVariableSpec::normal(lim, 0.3),
                                                           0.5 + rng.uniform01()));
                }
            }
        }
        auto rep_out = check_commute(rdm, I, xi, {derive_seed(1000, rep)});
        REQUIRE(rep_out.commutes);
    }
}

TEST_CASE("solution samples carry the defect measured against the stored mechanism") {
    auto rdm = contractive_linear();
    auto scm = scm_from_rdm(rdm);
    std::uint64_t seed = derive_seed(321, 0);
    RealizedModel rm = realize_model(rdm, seed);
    Vector e = rm.exo_limit(rdm.exo_dim(), rdm.exo);
    auto sol = solve_linear_scm(scm, e, seed);
    auto sample = make_solution_sample(scm, seed, sol.x, e);
    REQUIRE(sample.residual < 1e-12);
    Vector off = sol.x;
    off[0] += 0.5;
    auto bad = make_solution_sample(scm, seed, off, e);
    REQUIRE(bad.residual > 0.1);
    REQUIRE(bad.residual == residual(scm, off, e, seed));
}

TEST_CASE("pretty-printed equations name every coordinate") {
    auto scm = scm_from_rdm(make_oscillator_rdm(chain_params()));
    std::string text = pretty_print_scm(scm);
    REQUIRE(text.find("Q1 = ") != std::string::npos);
    REQUIRE(text.find("P5") != std::string::npos);
    REQUIRE(text.find("l0") != std::string::npos);
    auto enzyme = scm_from_rdm(make_enzyme_rdm());
    std::string et = pretty_print_scm(enzyme);
    REQUIRE(et.find("S = S + 0.5") != std::string::npos);
    REQUIRE(et.find("*E*S") != std::string::npos);
}
