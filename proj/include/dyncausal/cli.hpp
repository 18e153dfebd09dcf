#pragma once

#include "dyncausal/analysis.hpp"
#include "dyncausal/model_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dyncausal::cli {

namespace fs = std::filesystem;

// exit codes: 0 success, 1 failed check or runtime error, 2 usage/model errors
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommonOverrides {
    std::optional<int> paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_end;
    int threads = 1;

    void apply(ModelFile& mf) const {
        if (paths) mf.n_paths = *paths;
        if (seed) mf.master_seed = *seed;
        if (t_end) mf.ctrl.t_end = *t_end;
    }
};

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

// "C=0.3125,S=1" or bare names ("Q3"); bare targets pin the block at zero,
// which is enough for graph surgery.
inline std::vector<std::pair<std::string, double>> parse_intervention_list(const std::string& arg) {
    std::vector<std::pair<std::string, double>> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            out.emplace_back(item, 0.0);
        else
            out.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
    }
    return out;
}

// Block selector: exact names, or a prefix that matches several blocks
// ("P" selects P1..P5).
inline std::set<int> select_blocks(const std::vector<Block>& blocks, const std::string& arg) {
    std::set<int> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        int exact = find_block(blocks, item);
        if (exact >= 0) {
            out.insert(exact);
            continue;
        }
        bool any = false;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (blocks[i].name.rfind(item, 0) == 0) {
                out.insert(static_cast<int>(i));
                any = true;
            }
        }
        if (!any) throw std::invalid_argument("no block matches '" + item + "'");
    }
    return out;
}

// Recognizes the bundled enzyme network so the hand-solved loop-free
// equations can stand in where generic self-loop removal would need symbolic
// algebra.
inline std::optional<EnzymeRates> enzyme_rates_from(const RandomDynamicalModel& rdm) {
    const auto* ma = std::get_if<MassActionDynamics>(&rdm.dynamics);
    if (!ma || rdm.endo.size() != 4 || !rdm.exo.empty()) return std::nullopt;
    int S = find_block(rdm.endo, "S"), E = find_block(rdm.endo, "E");
    int C = find_block(rdm.endo, "C"), P = find_block(rdm.endo, "P");
    if (S < 0 || E < 0 || C < 0 || P < 0 || ma->reactions.size() != 3) return std::nullopt;
    EnzymeRates r;
    bool bind = false, unbind = false, convert = false;
    for (const auto& rx : ma->reactions) {
        auto sorted = [](std::vector<std::pair<int, int>> v) {
            std::sort(v.begin(), v.end());
            return v;
        };
        auto reac = sorted(rx.reactants), prod = sorted(rx.products);
        std::vector<std::pair<int, int>> es = sorted({{E, 1}, {S, 1}});
        std::vector<std::pair<int, int>> ep = sorted({{E, 1}, {P, 1}});
        if (reac == es && prod == std::vector<std::pair<int, int>>{{C, 1}}) {
            r.kf = rx.rate;
            bind = true;
        } else if (reac == std::vector<std::pair<int, int>>{{C, 1}} && prod == es) {
            r.kr = rx.rate;
            unbind = true;
        } else if (reac == std::vector<std::pair<int, int>>{{C, 1}} && prod == ep) {
            r.kc = rx.rate;
            convert = true;
        } else {
            return std::nullopt;
        }
    }
    if (!(bind && unbind && convert)) return std::nullopt;
    for (int s = 0; s < 4; ++s) {
        if (s != S && ma->inflow[s] != 0.0) return std::nullopt;
        if (s != P && ma->outflow[s] != 0.0) return std::nullopt;
    }
    r.ki = ma->inflow[S];
    r.ko = ma->outflow[P];
    return r;
}

struct CsvTable {
    std::vector<std::string> columns;
    Matrix values;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("csv: no column named '" + name + "'");
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file '" + path + "'");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.columns.push_back(cell);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size()) throw std::runtime_error("csv: ragged row in '" + path + "'");
        rows.push_back(std::move(row));
    }
    table.values.resize(rows.size(), table.columns.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < table.columns.size(); ++c) table.values(r, c) = rows[r][c];
    return table;
}

// ---- subcommand bodies ------------------------------------------------------

inline int cmd_simulate(const std::string& model_path, const std::string& out_dir, const CommonOverrides& ov,
                        bool store_trajectories, std::ostream& out) {
    ModelFile mf = load_model_file(model_path);
    ov.apply(mf);
    fs::create_directories(out_dir);
    RandomDynamicalModel rdm = mf.intervened_model();
    EnsembleOptions opt{store_trajectories, ov.threads};
    EnsembleResult res =
        run_ensemble(rdm, mf.initial_condition(), mf.ctrl, mf.n_paths, mf.master_seed, mf.detection, opt);

    fs::path traj_path = fs::path(out_dir) / (mf.name + "_trajectories.csv");
    fs::path eq_path = fs::path(out_dir) / (mf.name + "_equilibrium.csv");
    if (store_trajectories) {
        std::ostringstream csv;
        write_trajectory_csv(csv, res, rdm);
        write_text_file(traj_path, csv.str());
    }
    {
        std::ostringstream csv;
        write_equilibrium_csv(csv, res, rdm);
        write_text_file(eq_path, csv.str());
    }

    Json report;
    report["model"] = mf.name;
    report["n_paths"] = mf.n_paths;
    report["master_seed"] = mf.master_seed;
    report["t_end"] = mf.ctrl.t_end;
    report["n_equilibrated"] = res.n_equilibrated;
    report["n_failed"] = res.n_failed;
    Json files = Json::array();
    if (store_trajectories) files.push_back(traj_path.string());
    files.push_back(eq_path.string());
    report["outputs"] = files;
    fs::path report_path = fs::path(out_dir) / (mf.name + "_report.json");
    write_text_file(report_path, report.dump(2) + "\n");

    out << "model " << mf.name << ": " << res.n_equilibrated << "/" << mf.n_paths << " paths equilibrated";
    if (res.n_failed > 0) out << " (" << res.n_failed << " failed)";
    out << "\n";
    for (const auto& f : files) out << "wrote " << f.get<std::string>() << "\n";
    out << "wrote " << report_path.string() << "\n";
    return kExitOk;
}

struct ScmTransformFlags {
    std::string intervene;    // "C=0.3125,S=1"
    std::string marginalize;  // "P" or "P1,P2"
    bool resolve_self_loops = false;
};

inline StructuralCausalModel derive_transformed_scm(const RandomDynamicalModel& rdm, const ScmTransformFlags& flags) {
    StructuralCausalModel scm;
    bool nonlinear = !std::holds_alternative<LinearDynamics>(rdm.dynamics);
    if (nonlinear && flags.resolve_self_loops) {
        auto rates = enzyme_rates_from(rdm);
        if (!rates)
            throw std::invalid_argument(
                "resolve-self-loops on a nonlinear mechanism is only available for the bundled enzyme network");
        scm = make_enzyme_loop_free_scm(*rates);
        for (const auto& [k, spec] : rdm.intervened_processes)
            scm = intervene_scm(scm, {{k, spec.limit_spec()}});
    } else {
        scm = scm_from_rdm(rdm);
    }
    if (!flags.intervene.empty()) {
        for (const auto& [name, value] : parse_intervention_list(flags.intervene))
            scm = intervene_scm(scm, name, value);
    }
    if (!flags.marginalize.empty()) scm = marginalize_linear(scm, select_blocks(scm.endo, flags.marginalize));
    if (flags.resolve_self_loops && !nonlinear) scm = remove_self_loops_linear(scm);
    return scm;
}

inline int cmd_derive_scm(const std::string& model_path, const std::string& out_dir, const ScmTransformFlags& flags,
                          std::ostream& out) {
    ModelFile mf = load_model_file(model_path);
    fs::create_directories(out_dir);
    RandomDynamicalModel rdm = mf.intervened_model();
    StructuralCausalModel scm = derive_transformed_scm(rdm, flags);

    std::string solvability;
    try {
        Vector e = Vector::Zero(scm.exo_dim());
        for (std::size_t j = 0; j < scm.exo.size(); ++j)
            e.segment(scm.exo[j].offset, scm.exo[j].dim) = scm.exo_star[j].mean_value();
        auto sol = solve_linear_scm(scm, e);
        std::ostringstream note;
        note << "uniquely solvable (condition " << format_number(sol.condition) << ")";
        solvability = note.str();
    } catch (const NoUniqueSolutionError&) {
        solvability = "not uniquely solvable";
    } catch (const std::invalid_argument&) {
        solvability = "nonlinear mechanism; no direct solver";
    }

    Json sj = scm_to_json(scm);
    sj["solvability"] = solvability;
    fs::path json_path = fs::path(out_dir) / (mf.name + "_scm.json");
    fs::path txt_path = fs::path(out_dir) / (mf.name + "_scm.txt");
    fs::path dot_path = fs::path(out_dir) / (mf.name + "_scm.dot");
    write_text_file(json_path, sj.dump(2) + "\n");
    write_text_file(txt_path, pretty_print_scm(scm));
    write_text_file(dot_path, to_dot(functional_graph_scm(scm), mf.name));

    out << "derived causal model for " << mf.name << " (" << solvability << ")\n";
    out << pretty_print_scm(scm);
    out << "wrote " << json_path.string() << "\n";
    out << "wrote " << txt_path.string() << "\n";
    out << "wrote " << dot_path.string() << "\n";
    return kExitOk;
}

inline int cmd_check(const std::string& which, const std::string& model_path, const CommonOverrides& ov,
                     int n_probes, std::ostream& out) {
    ModelFile mf = load_model_file(model_path);
    ov.apply(mf);

    if (which == "thm2") {
        RandomDynamicalModel rdm = mf.intervened_model();
        StructuralCausalModel scm = scm_from_rdm(rdm);
        EnsembleResult res = run_ensemble(rdm, mf.initial_condition(), mf.ctrl, mf.n_paths, mf.master_seed,
                                          mf.detection, {false, ov.threads});
        const double eps_accept = 10.0 * (mf.detection.eps_drift + mf.detection.eps_deriv);
        double max_res = 0.0;
        int checked = 0;
        bool ok = true;
        for (const auto& rec : res.paths) {
            if (!rec.status.equilibrated) continue;
            double r = residual(scm, *rec.status.x_star, rec.e_star, rec.seed);
            max_res = std::max(max_res, r);
            ++checked;
            if (r > eps_accept) {
                ok = false;
                out << "  path " << rec.path_id << ": residual " << format_number(r) << " exceeds "
                    << format_number(eps_accept) << "\n";
            }
        }
        out << "thm2 " << mf.name << ": " << checked << " equilibrated paths, max residual "
            << format_number(max_res) << " (tolerance " << format_number(eps_accept) << ") -> "
            << (ok && checked > 0 ? "PASS" : "FAIL") << "\n";
        return ok && checked > 0 ? kExitOk : kExitFailure;
    }

    if (which == "prop1") {
        RandomDynamicalModel rdm = mf.intervened_model();
        for (const auto& spec : rdm.exogenous_processes)
            if (!spec.holds<ProcessSpec::Constant>())
                throw std::invalid_argument("prop1 check needs time-constant exogenous processes");
        for (const auto& [k, spec] : rdm.intervened_processes)
            if (!spec.holds<ProcessSpec::Constant>())
                throw std::invalid_argument("prop1 check needs time-constant intervened processes");
        StructuralCausalModel scm = scm_from_rdm(rdm);
        int n = std::min(mf.n_paths, 20);
        bool ok = true;
        double worst = 0.0;
        for (int p = 0; p < n; ++p) {
            std::uint64_t seed = derive_seed(mf.master_seed, p);
            RealizedModel rm = realize_model(rdm, seed);
            Vector e = rm.exo_limit(rdm.exo_dim(), rdm.exo);
            auto sol = solve_linear_scm(scm, e, seed);
            InitialCondition init{mf.t0, RandomVariableSpec::point_mass(sol.x)};
            Trajectory tr = integrate_path(rdm, init, mf.ctrl, seed, p);
            double drift = 0.0;
            for (int i = 0; i < tr.times.size(); ++i)
                drift = std::max(drift, (tr.values.row(i).transpose() - sol.x).norm());
            worst = std::max(worst, drift);
            if (drift > 1e-6) {
                ok = false;
                out << "  seed " << seed << ": replay drift " << format_number(drift) << "\n";
            }
        }
        out << "prop1 " << mf.name << ": " << n << " solutions replayed as constant paths, max drift "
            << format_number(worst) << " -> " << (ok ? "PASS" : "FAIL") << "\n";
        return ok ? kExitOk : kExitFailure;
    }

    if (which == "thm4") {
        if (mf.interventions.empty())
            throw std::invalid_argument("thm4 check needs an interventions block in the model file");
        std::set<int> I;
        std::map<int, ProcessSpec> xi;
        for (const auto& [target, spec] : mf.interventions) {
            int i = find_block(mf.base.endo, target);
            if (i < 0) throw std::invalid_argument("unknown intervention target '" + target + "'");
            I.insert(i);
            xi.erase(i);
            xi.emplace(i, spec);
        }
        std::vector<std::uint64_t> seeds;
        for (int s = 0; s < std::min(mf.n_paths, 8); ++s) seeds.push_back(derive_seed(mf.master_seed, s));
        auto rep = check_commute(mf.base, I, xi, seeds, n_probes);
        out << "thm4 " << mf.name << ": " << rep.probes_run << " probes, max deviation "
            << format_number(rep.max_probe_deviation) << " -> " << (rep.commutes ? "PASS" : "FAIL") << "\n";
        for (const auto& m : rep.mismatches) out << "  " << m << "\n";
        return rep.commutes ? kExitOk : kExitFailure;
    }

    throw std::invalid_argument("unknown check '" + which + "' (expected thm2, prop1 or thm4)");
}

inline int cmd_ci_test(const std::string& csv_path, const std::string& x, const std::string& y,
                       const std::string& given, double alpha, std::ostream& out) {
    CsvTable table = read_csv(csv_path);
    Matrix samples = table.values;
    // keep only rows flagged as equilibrated when the flag column exists
    if (std::find(table.columns.begin(), table.columns.end(), "equilibrated") != table.columns.end()) {
        int flag = table.column("equilibrated");
        std::vector<int> keep;
        for (int r = 0; r < samples.rows(); ++r)
            if (samples(r, flag) == 1.0) keep.push_back(r);
        Matrix filtered(keep.size(), samples.cols());
        for (std::size_t r = 0; r < keep.size(); ++r) filtered.row(r) = samples.row(keep[r]);
        samples = std::move(filtered);
    }
    std::vector<int> Z;
    std::string zlabel;
    if (!given.empty()) {
        std::stringstream ss(given);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            Z.push_back(table.column(item));
            zlabel += (zlabel.empty() ? "" : ",") + item;
        }
    }
    auto res = ci_test(samples, table.column(x), table.column(y), Z, alpha);
    out << "ci-test x=" << x << " y=" << y << " given=" << (zlabel.empty() ? "-" : zlabel) << " n=" << res.n
        << " r=" << format_number(res.statistic) << " z=" << format_number(res.z_score) << " alpha=" << alpha
        << " independent=" << (res.independent ? "true" : "false") << "\n";
    return kExitOk;
}

inline int cmd_graph(const std::string& model_path, bool want_rdm, const ScmTransformFlags& flags,
                     const std::string& out_file, std::ostream& out) {
    ModelFile mf = load_model_file(model_path);
    RandomDynamicalModel rdm = mf.intervened_model();
    DirectedMixedGraph g;
    if (want_rdm) {
        if (!flags.intervene.empty()) {
            for (const auto& [name, value] : parse_intervention_list(flags.intervene))
                rdm = intervene_rdm(rdm, name, ProcessSpec::constant_value(Vector::Constant(1, value)));
        }
        if (!flags.marginalize.empty() || flags.resolve_self_loops)
            throw std::invalid_argument("marginalize/resolve-self-loops apply to the derived causal model (--scm)");
        g = functional_graph_rdm(rdm);
    } else {
        g = functional_graph_scm(derive_transformed_scm(rdm, flags));
    }
    std::string dot = to_dot(g, mf.name);
    if (out_file.empty()) {
        out << dot;
    } else {
        if (auto dir = fs::path(out_file).parent_path(); !dir.empty()) fs::create_directories(dir);
        write_text_file(out_file, dot);
        out << "wrote " << out_file << "\n";
    }
    return kExitOk;
}

inline int cmd_reproduce(const std::string& id, const std::string& models_dir, const std::string& out_dir,
                         const CommonOverrides& ov, std::ostream& out) {
    auto model = [&](const std::string& name) { return (fs::path(models_dir) / (name + ".json")).string(); };
    fs::create_directories(out_dir);

    auto simulate_uniform_box = [&](const std::string& name, double lo, double hi) {
        ModelFile mf = load_model_file(model(name));
        ov.apply(mf);
        // figure runs start anywhere in [lo, hi] per concentration, with
        // intervened coordinates pinned to their process value at t0
        RandomDynamicalModel rdm = mf.intervened_model();
        Vector l = Vector::Constant(rdm.endo_dim(), lo), h = Vector::Constant(rdm.endo_dim(), hi);
        for (const auto& [k, spec] : rdm.intervened_processes) {
            Vector v0 = RealizedProcess(spec, 0).at(mf.t0);
            l.segment(rdm.endo[k].offset, rdm.endo[k].dim) = v0;
            h.segment(rdm.endo[k].offset, rdm.endo[k].dim) = v0;
        }
        mf.initial = RandomVariableSpec::uniform_box(l, h);
        EnsembleResult res = run_ensemble(rdm, mf.initial_condition(), mf.ctrl, mf.n_paths, mf.master_seed,
                                          mf.detection, {true, ov.threads});
        std::ostringstream traj, eq;
        write_trajectory_csv(traj, res, rdm);
        write_equilibrium_csv(eq, res, rdm);
        fs::path tp = fs::path(out_dir) / (id + "_trajectories.csv");
        fs::path ep = fs::path(out_dir) / (id + "_equilibrium.csv");
        write_text_file(tp, traj.str());
        write_text_file(ep, eq.str());
        out << "model " << mf.name << ": " << res.n_equilibrated << "/" << mf.n_paths << " paths equilibrated\n";
        out << "wrote " << tp.string() << "\nwrote " << ep.string() << "\n";
    };
    auto graph_to = [&](const std::string& name, bool want_rdm, const ScmTransformFlags& flags) {
        fs::path file = fs::path(out_dir) / (id + ".dot");
        cmd_graph(model(name), want_rdm, flags, file.string(), out);
    };

    if (id == "fig2") {
        graph_to("oscillator_ci", true, {});
    } else if (id == "fig3a") {
        graph_to("oscillator_ci", false, {"", "P", true});
    } else if (id == "fig3b") {
        graph_to("oscillator_do_q3", false, {"", "P", true});
    } else if (id == "fig5a") {
        simulate_uniform_box("enzyme", 0.0, 2.0);
    } else if (id == "fig5b") {
        simulate_uniform_box("enzyme_do_c", 0.0, 2.0);
    } else if (id == "fig5c") {
        simulate_uniform_box("enzyme_do_c_s", 0.0, 2.0);
    } else if (id == "fig7a") {
        graph_to("enzyme_do_c", false, {"", "", true});
    } else if (id == "fig7b") {
        graph_to("enzyme_do_c_s", false, {"", "", true});
    } else {
        throw std::invalid_argument("unknown figure id '" + id +
                                    "' (expected fig2, fig3a, fig3b, fig5a, fig5b, fig5c, fig7a, fig7b)");
    }
    return kExitOk;
}

// ---- entry point --------------------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"simulate random dynamical models and analyze their equilibrium causal structure"};
    app.require_subcommand(1);

    CommonOverrides ov;
    std::string model_path, out_dir = ".", out_file, csv_path;
    bool no_traj = false, want_rdm = false, want_scm = false;
    ScmTransformFlags flags;
    std::string check_name, x_col, y_col, given_cols, fig_id, models_dir = "models";
    double alpha = 0.01;
    int n_probes = 16;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--paths", ov.paths, "override the number of sample paths");
        sub->add_option("--seed", ov.seed, "override the master seed");
        sub->add_option("--t-end", ov.t_end, "override the integration horizon");
        sub->add_option("--threads", ov.threads, "worker threads for ensembles");
    };

    auto* sim = app.add_subcommand("simulate", "run an ensemble and export trajectory/equilibrium CSV");
    sim->add_option("model", model_path, "model file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--no-trajectories", no_traj, "skip the trajectory CSV");
    add_common(sim);

    auto* derive = app.add_subcommand("derive-scm", "derive the equilibrium causal model");
    derive->add_option("model", model_path, "model file")->required();
    derive->add_option("--out", out_dir, "output directory");
    derive->add_option("--intervene", flags.intervene, "extra interventions, e.g. C=0.3125,S=1");
    derive->add_option("--marginalize", flags.marginalize, "blocks to eliminate, e.g. P or P1,P2");
    derive->add_flag("--resolve-self-loops", flags.resolve_self_loops, "rewrite each equation solved for itself");

    auto* check = app.add_subcommand("check", "verify an equilibrium/intervention property");
    check->add_option("name", check_name, "thm2, prop1 or thm4")->required();
    check->add_option("model", model_path, "model file")->required();
    check->add_option("--probes", n_probes, "probe points per seed (thm4)");
    add_common(check);

    auto* ci = app.add_subcommand("ci-test", "partial-correlation independence test on equilibrium samples");
    ci->add_option("csv", csv_path, "equilibrium CSV")->required();
    ci->add_option("--x", x_col, "first column")->required();
    ci->add_option("--y", y_col, "second column")->required();
    ci->add_option("--given", given_cols, "conditioning columns, comma separated");
    ci->add_option("--alpha", alpha, "test level");

    auto* graph = app.add_subcommand("graph", "export a functional graph as DOT");
    graph->add_option("model", model_path, "model file")->required();
    graph->add_flag("--rdm", want_rdm, "graph of the dynamical model");
    graph->add_flag("--scm", want_scm, "graph of the derived causal model");
    graph->add_option("--intervene", flags.intervene, "interventions, e.g. Q3 or C=0.3125,S=1");
    graph->add_option("--marginalize", flags.marginalize, "blocks to eliminate (with --scm)");
    graph->add_flag("--resolve-self-loops", flags.resolve_self_loops, "resolve self-loops (with --scm)");
    graph->add_option("--out", out_file, "output DOT file (stdout when omitted)");

    auto* rep = app.add_subcommand("reproduce", "rebuild a bundled scenario artifact");
    rep->add_option("id", fig_id, "fig2, fig3a, fig3b, fig5a, fig5b, fig5c, fig7a or fig7b")->required();
    rep->add_option("--models", models_dir, "directory with the bundled model files");
    rep->add_option("--out", out_dir, "output directory");
    add_common(rep);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(model_path, out_dir, ov, !no_traj, out);
        if (derive->parsed()) return cmd_derive_scm(model_path, out_dir, flags, out);
        if (check->parsed()) return cmd_check(check_name, model_path, ov, n_probes, out);
        if (ci->parsed()) return cmd_ci_test(csv_path, x_col, y_col, given_cols, alpha, out);
        if (graph->parsed()) {
            if (want_rdm == want_scm) throw std::invalid_argument("choose exactly one of --rdm or --scm");
            return cmd_graph(model_path, want_rdm, flags, out_file, out);
        }
        if (rep->parsed()) return cmd_reproduce(fig_id, models_dir, out_dir, ov, out);
    } catch (const ModelParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace dyncausal::cli
