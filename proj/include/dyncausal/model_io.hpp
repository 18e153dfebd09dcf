#pragma once

#include "dyncausal/presets.hpp"
#include "dyncausal/scm.hpp"
#include "dyncausal/simulate.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dyncausal {

using Json = nlohmann::ordered_json;

struct ModelParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A fully parsed model file: the base (non-intervened) model, the declared
// interventions, and the run block.
struct ModelFile {
    std::string name;
    RandomDynamicalModel base;
    std::optional<OscillatorParams> oscillator;  // kept for faithful re-serialization
    std::vector<std::pair<std::string, ProcessSpec>> interventions;

    double t0 = 0.0;
    StepControl ctrl;
    int n_paths = 100;
    std::uint64_t master_seed = 0;
    DetectionParams detection;
    RandomVariableSpec initial;

    RandomDynamicalModel intervened_model() const {
        RandomDynamicalModel rdm = base;
        for (const auto& [target, spec] : interventions) rdm = intervene_rdm(rdm, target, spec);
        return rdm;
    }
    InitialCondition initial_condition() const { return {t0, initial}; }
};

namespace model_io_detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw ModelParseError("model file: " + where + ": " + what);
}

inline void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed,
                       const std::set<std::string>& required) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
    for (const auto& key : required)
        if (!obj.contains(key)) fail(where, "missing key '" + key + "'");
}

inline Vector parse_vector(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(where, "expected an array of numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

inline Matrix parse_matrix(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
    Matrix m;
    for (std::size_t r = 0; r < j.size(); ++r) {
        Vector row = parse_vector(j[r], where + "[" + std::to_string(r) + "]");
        if (r == 0) m.resize(j.size(), row.size());
        if (row.size() != m.cols()) fail(where, "ragged rows");
        m.row(r) = row.transpose();
    }
    return m;
}

inline Json dump_vector(const Vector& v) {
    Json j = Json::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

inline Json dump_matrix(const Matrix& m) {
    Json j = Json::array();
    for (int r = 0; r < m.rows(); ++r) j.push_back(dump_vector(m.row(r).transpose()));
    return j;
}

inline RandomVariableSpec parse_rv(const Json& j, const std::string& where) {
    check_keys(j, where, {"kind", "value", "mean", "covariance", "std", "lower", "upper"}, {"kind"});
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "point_mass") {
        check_keys(j, where, {"kind", "value"}, {"kind", "value"});
        return RandomVariableSpec::point_mass(parse_vector(j.at("value"), where + ".value"));
    }
    if (kind == "normal") {
        Vector mean = parse_vector(j.at("mean"), where + ".mean");
        if (j.contains("covariance") == j.contains("std"))
            fail(where, "normal needs exactly one of 'covariance' or 'std'");
        if (j.contains("std")) {
            double s = j.at("std").get<double>();
            Matrix cov = Matrix::Identity(mean.size(), mean.size()) * (s * s);
            return RandomVariableSpec::normal(mean, cov);
        }
        return RandomVariableSpec::normal(mean, parse_matrix(j.at("covariance"), where + ".covariance"));
    }
    if (kind == "uniform_box") {
        check_keys(j, where, {"kind", "lower", "upper"}, {"kind", "lower", "upper"});
        return RandomVariableSpec::uniform_box(parse_vector(j.at("lower"), where + ".lower"),
                                               parse_vector(j.at("upper"), where + ".upper"));
    }
    fail(where, "unknown random-variable kind '" + kind + "'");
}

inline Json dump_rv(const RandomVariableSpec& rv) {
    Json j;
    switch (rv.kind()) {
        case RandomVariableSpec::Kind::PointMass:
            j["kind"] = "point_mass";
            j["value"] = dump_vector(rv.value());
            break;
        case RandomVariableSpec::Kind::Normal:
            j["kind"] = "normal";
            j["mean"] = dump_vector(rv.mean());
            j["covariance"] = dump_matrix(rv.covariance());
            break;
        case RandomVariableSpec::Kind::UniformBox:
            j["kind"] = "uniform_box";
            j["lower"] = dump_vector(rv.lower());
            j["upper"] = dump_vector(rv.upper());
            break;
    }
    return j;
}

inline ProcessSpec parse_process(const Json& j, const std::string& where) {
    check_keys(j, where, {"kind", "rv", "knots", "limit", "amplitude", "rate", "settle_time", "start"}, {"kind"});
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        check_keys(j, where, {"kind", "rv"}, {"kind", "rv"});
        return ProcessSpec::constant(parse_rv(j.at("rv"), where + ".rv"));
    }
    if (kind == "deterministic_path") {
        check_keys(j, where, {"kind", "knots", "limit"}, {"kind", "knots", "limit"});
        std::vector<std::pair<double, Vector>> knots;
        for (const auto& kj : j.at("knots")) {
            check_keys(kj, where + ".knots[]", {"t", "value"}, {"t", "value"});
            knots.emplace_back(kj.at("t").get<double>(), parse_vector(kj.at("value"), where + ".knots[].value"));
        }
        return ProcessSpec::deterministic_path(std::move(knots), parse_vector(j.at("limit"), where + ".limit"));
    }
    if (kind == "exp_transient") {
        check_keys(j, where, {"kind", "limit", "amplitude", "rate"}, {"kind", "limit", "amplitude", "rate"});
        return ProcessSpec::exp_transient(parse_rv(j.at("limit"), where + ".limit"),
                                          parse_rv(j.at("amplitude"), where + ".amplitude"),
                                          j.at("rate").get<double>());
    }
    if (kind == "ramp_to") {
        check_keys(j, where, {"kind", "limit", "settle_time", "start"}, {"kind", "limit", "settle_time"});
        auto limit = parse_rv(j.at("limit"), where + ".limit");
        double settle = j.at("settle_time").get<double>();
        if (j.contains("start")) return ProcessSpec::ramp_to(limit, settle, parse_rv(j.at("start"), where + ".start"));
        return ProcessSpec::ramp_to(limit, settle);
    }
    fail(where, "unknown process kind '" + kind + "'");
}

inline Json dump_process(const ProcessSpec& p) {
    Json j;
    if (p.holds<ProcessSpec::Constant>()) {
        j["kind"] = "constant";
        j["rv"] = dump_rv(p.get<ProcessSpec::Constant>().rv);
    } else if (p.holds<ProcessSpec::DeterministicPath>()) {
        const auto& d = p.get<ProcessSpec::DeterministicPath>();
        j["kind"] = "deterministic_path";
        j["knots"] = Json::array();
        for (const auto& [t, v] : d.knots) {
            Json kj;
            kj["t"] = t;
            kj["value"] = dump_vector(v);
            j["knots"].push_back(kj);
        }
        j["limit"] = dump_vector(d.limit);
    } else if (p.holds<ProcessSpec::ExpTransient>()) {
        const auto& e = p.get<ProcessSpec::ExpTransient>();
        j["kind"] = "exp_transient";
        j["limit"] = dump_rv(e.limit);
        j["amplitude"] = dump_rv(e.amplitude);
        j["rate"] = e.rate;
    } else {
        const auto& r = p.get<ProcessSpec::RampTo>();
        j["kind"] = "ramp_to";
        j["limit"] = dump_rv(r.limit);
        j["settle_time"] = r.settle_time;
        j["start"] = dump_rv(r.start);
    }
    return j;
}

}  // namespace model_io_detail

inline ModelFile parse_model_json(const Json& root);

// Parses model text, translating JSON syntax errors to line/column form.
inline ModelFile parse_model_file(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        std::size_t offset = err.byte;
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "model file: syntax error at line " << line << ", column " << col;
        throw ModelParseError(msg.str());
    }
    return parse_model_json(root);
}

inline ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelParseError("model file: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model_file(buf.str());
}

inline ModelFile parse_model_json(const Json& root) {
    using namespace model_io_detail;
    check_keys(root, "$", {"name", "endogenous", "exogenous", "dynamics", "interventions", "run"},
               {"name", "dynamics", "run"});
    ModelFile mf;
    mf.name = root.at("name").get<std::string>();

    const Json& dyn = root.at("dynamics");
    check_keys(dyn, "dynamics",
               {"kind", "B", "Gamma", "drive", "reactions", "inflow", "outflow", "d", "k", "b", "m", "L", "lengths"},
               {"kind"});
    const std::string kind = dyn.at("kind").get<std::string>();

    if (kind == "oscillator") {
        if (root.contains("endogenous") || root.contains("exogenous"))
            fail("dynamics", "oscillator models declare their blocks implicitly");
        check_keys(dyn, "dynamics", {"kind", "d", "k", "b", "m", "L", "lengths"}, {"kind", "d", "k", "b", "m", "L"});
        OscillatorParams p;
        p.d = dyn.at("d").get<int>();
        auto to_std = [&](const Json& j, const std::string& w) {
            Vector v = parse_vector(j, w);
            return std::vector<double>(v.data(), v.data() + v.size());
        };
        p.k = to_std(dyn.at("k"), "dynamics.k");
        p.b = to_std(dyn.at("b"), "dynamics.b");
        p.m = to_std(dyn.at("m"), "dynamics.m");
        p.L = dyn.at("L").get<double>();
        if (dyn.contains("lengths")) {
            const Json& lj = dyn.at("lengths");
            check_keys(lj, "dynamics.lengths", {"kind", "mean", "std", "value", "items"}, {"kind"});
            std::string lkind = lj.at("kind").get<std::string>();
            if (lkind == "normal_iid") {
                double mean = lj.contains("mean") ? lj.at("mean").get<double>() : p.L / (p.d + 1);
                p.set_lengths_normal(mean, lj.at("std").get<double>());
            } else if (lkind == "point_mass") {
                double v = lj.contains("value") ? lj.at("value").get<double>() : p.L / (p.d + 1);
                p.set_lengths_point_mass(v);
            } else if (lkind == "list") {
                for (const auto& item : lj.at("items"))
                    p.lengths.push_back(parse_rv(item, "dynamics.lengths.items[]"));
            } else {
                fail("dynamics.lengths", "unknown kind '" + lkind + "'");
            }
        }
        mf.oscillator = p;
        mf.base = make_oscillator_rdm(p);
    } else {
        if (!root.contains("endogenous")) fail("$", "missing key 'endogenous'");
        std::vector<Block> endo;
        for (const auto& ej : root.at("endogenous")) {
            check_keys(ej, "endogenous[]", {"name", "dim"}, {"name"});
            endo.push_back({ej.at("name").get<std::string>(), ej.contains("dim") ? ej.at("dim").get<int>() : 1, 0});
        }
        std::vector<Block> exo;
        std::vector<ProcessSpec> exo_specs;
        if (root.contains("exogenous")) {
            for (const auto& xj : root.at("exogenous")) {
                check_keys(xj, "exogenous[]", {"name", "process"}, {"name", "process"});
                ProcessSpec spec = parse_process(xj.at("process"), "exogenous[].process");
                exo.push_back({xj.at("name").get<std::string>(), spec.dimension(), 0});
                exo_specs.push_back(std::move(spec));
            }
        }
        RandomDynamicalModel rdm;
        rdm.endo = layout_blocks(std::move(endo));
        rdm.exo = layout_blocks(std::move(exo));
        rdm.exogenous_processes = std::move(exo_specs);

        if (kind == "linear") {
            check_keys(dyn, "dynamics", {"kind", "B", "Gamma", "drive"}, {"kind", "B"});
            LinearDynamics lin;
            lin.B = parse_matrix(dyn.at("B"), "dynamics.B");
            lin.Gamma = dyn.contains("Gamma") ? parse_matrix(dyn.at("Gamma"), "dynamics.Gamma")
                                              : Matrix::Zero(lin.B.rows(), rdm.exo_dim());
            if (dyn.contains("drive")) lin.drive = parse_vector(dyn.at("drive"), "dynamics.drive");
            rdm.dynamics = std::move(lin);
        } else if (kind == "mass_action") {
            check_keys(dyn, "dynamics", {"kind", "reactions", "inflow", "outflow"}, {"kind", "reactions"});
            MassActionDynamics ma;
            ma.inflow = Vector::Zero(rdm.endo_dim());
            ma.outflow = Vector::Zero(rdm.endo_dim());
            auto species_index = [&](const std::string& name, const std::string& w) {
                int i = find_block(rdm.endo, name);
                if (i < 0) fail(w, "unknown species '" + name + "'");
                return i;
            };
            for (const auto& rj : dyn.at("reactions")) {
                check_keys(rj, "dynamics.reactions[]", {"reactants", "products", "rate"}, {"rate"});
                Reaction r;
                r.rate = rj.at("rate").get<double>();
                if (rj.contains("reactants"))
                    for (const auto& [nm, cnt] : rj.at("reactants").items())
                        r.reactants.emplace_back(species_index(nm, "dynamics.reactions[].reactants"),
                                                 cnt.get<int>());
                if (rj.contains("products"))
                    for (const auto& [nm, cnt] : rj.at("products").items())
                        r.products.emplace_back(species_index(nm, "dynamics.reactions[].products"), cnt.get<int>());
                ma.reactions.push_back(std::move(r));
            }
            if (dyn.contains("inflow"))
                for (const auto& [nm, v] : dyn.at("inflow").items())
                    ma.inflow[species_index(nm, "dynamics.inflow")] = v.get<double>();
            if (dyn.contains("outflow"))
                for (const auto& [nm, v] : dyn.at("outflow").items())
                    ma.outflow[species_index(nm, "dynamics.outflow")] = v.get<double>();
            rdm.dynamics = std::move(ma);
        } else {
            fail("dynamics", "unknown dynamics kind '" + kind + "'");
        }
        rdm.validate();
        mf.base = std::move(rdm);
    }

    if (root.contains("interventions")) {
        for (const auto& ij : root.at("interventions")) {
            check_keys(ij, "interventions[]", {"target", "value", "process"}, {"target"});
            std::string target = ij.at("target").get<std::string>();
            if (ij.contains("value") == ij.contains("process"))
                fail("interventions[]", "need exactly one of 'value' or 'process'");
            if (ij.contains("value")) {
                Vector v = ij.at("value").is_number() ? Vector::Constant(1, ij.at("value").get<double>())
                                                      : parse_vector(ij.at("value"), "interventions[].value");
                mf.interventions.emplace_back(target, ProcessSpec::constant_value(v));
            } else {
                mf.interventions.emplace_back(target, parse_process(ij.at("process"), "interventions[].process"));
            }
        }
    }

    const Json& run = root.at("run");
    check_keys(run, "run",
               {"t0", "t_end", "method", "max_steps", "n_paths", "master_seed", "eps_drift", "eps_deriv",
                "window_fraction", "initial"},
               {"t_end", "method", "n_paths", "master_seed", "initial"});
    mf.t0 = run.contains("t0") ? run.at("t0").get<double>() : 0.0;
    mf.ctrl.t_end = run.at("t_end").get<double>();
    if (run.contains("max_steps")) mf.ctrl.max_steps = run.at("max_steps").get<long>();
    const Json& method = run.at("method");
    check_keys(method, "run.method", {"kind", "h", "rel_tol", "abs_tol", "max_step"}, {"kind"});
    std::string mkind = method.at("kind").get<std::string>();
    if (mkind == "rk4_fixed") {
        check_keys(method, "run.method", {"kind", "h"}, {"kind", "h"});
        mf.ctrl.method = StepControl::Rk4Fixed{method.at("h").get<double>()};
    } else if (mkind == "rk45_adaptive") {
        StepControl::Rk45Adaptive ad;
        if (method.contains("rel_tol")) ad.rel_tol = method.at("rel_tol").get<double>();
        if (method.contains("abs_tol")) ad.abs_tol = method.at("abs_tol").get<double>();
        if (method.contains("max_step")) ad.max_step = method.at("max_step").get<double>();
        mf.ctrl.method = ad;
    } else {
        fail("run.method", "unknown method kind '" + mkind + "'");
    }
    mf.n_paths = run.at("n_paths").get<int>();
    mf.master_seed = run.at("master_seed").get<std::uint64_t>();
    if (run.contains("eps_drift")) mf.detection.eps_drift = run.at("eps_drift").get<double>();
    if (run.contains("eps_deriv")) mf.detection.eps_deriv = run.at("eps_deriv").get<double>();
    if (run.contains("window_fraction")) mf.detection.window_fraction = run.at("window_fraction").get<double>();
    mf.initial = model_io_detail::parse_rv(run.at("initial"), "run.initial");
    if (mf.initial.dimension() != mf.base.endo_dim())
        fail("run.initial", "dimension does not match the endogenous state");
    return mf;
}

inline Json model_to_json(const ModelFile& mf) {
    using namespace model_io_detail;
    Json root;
    root["name"] = mf.name;

    if (!mf.oscillator) {
        Json endo = Json::array();
        for (const auto& b : mf.base.endo) {
            Json bj;
            bj["name"] = b.name;
            bj["dim"] = b.dim;
            endo.push_back(bj);
        }
        root["endogenous"] = endo;
        Json exo = Json::array();
        for (std::size_t j = 0; j < mf.base.exo.size(); ++j) {
            Json xj;
            xj["name"] = mf.base.exo[j].name;
            xj["process"] = dump_process(mf.base.exogenous_processes[j]);
            exo.push_back(xj);
        }
        if (!exo.empty()) root["exogenous"] = exo;
    }

    Json dyn;
    if (mf.oscillator) {
        const auto& p = *mf.oscillator;
        dyn["kind"] = "oscillator";
        dyn["d"] = p.d;
        dyn["k"] = p.k;
        dyn["b"] = p.b;
        dyn["m"] = p.m;
        dyn["L"] = p.L;
        Json lj;
        lj["kind"] = "list";
        lj["items"] = Json::array();
        for (const auto& rv : p.lengths) lj["items"].push_back(dump_rv(rv));
        dyn["lengths"] = lj;
    } else if (const auto* lin = std::get_if<LinearDynamics>(&mf.base.dynamics)) {
        dyn["kind"] = "linear";
        dyn["B"] = dump_matrix(lin->B);
        if (lin->Gamma.cols() > 0) dyn["Gamma"] = dump_matrix(lin->Gamma);
        if (lin->drive.size() > 0) dyn["drive"] = dump_vector(lin->drive);
    } else if (const auto* ma = std::get_if<MassActionDynamics>(&mf.base.dynamics)) {
        dyn["kind"] = "mass_action";
        dyn["reactions"] = Json::array();
        for (const auto& r : ma->reactions) {
            Json rj;
            Json reac, prod;
            for (const auto& [s, c] : r.reactants) reac[mf.base.endo[s].name] = c;
            for (const auto& [s, c] : r.products) prod[mf.base.endo[s].name] = c;
            if (!reac.is_null()) rj["reactants"] = reac;
            if (!prod.is_null()) rj["products"] = prod;
            rj["rate"] = r.rate;
            dyn["reactions"].push_back(rj);
        }
        Json inflow, outflow;
        for (std::size_t s = 0; s < mf.base.endo.size(); ++s) {
            if (ma->inflow[s] != 0.0) inflow[mf.base.endo[s].name] = ma->inflow[s];
            if (ma->outflow[s] != 0.0) outflow[mf.base.endo[s].name] = ma->outflow[s];
        }
        if (!inflow.is_null()) dyn["inflow"] = inflow;
        if (!outflow.is_null()) dyn["outflow"] = outflow;
    } else {
        throw std::invalid_argument("model_to_json: custom dynamics are not serializable");
    }
    root["dynamics"] = dyn;

    if (!mf.interventions.empty()) {
        Json ints = Json::array();
        for (const auto& [target, spec] : mf.interventions) {
            Json ij;
            ij["target"] = target;
            ij["process"] = dump_process(spec);
            ints.push_back(ij);
        }
        root["interventions"] = ints;
    }

    Json run;
    run["t0"] = mf.t0;
    run["t_end"] = mf.ctrl.t_end;
    Json method;
    if (const auto* fixed = std::get_if<StepControl::Rk4Fixed>(&mf.ctrl.method)) {
        method["kind"] = "rk4_fixed";
        method["h"] = fixed->h;
    } else {
        const auto& ad = std::get<StepControl::Rk45Adaptive>(mf.ctrl.method);
        method["kind"] = "rk45_adaptive";
        method["rel_tol"] = ad.rel_tol;
        method["abs_tol"] = ad.abs_tol;
        method["max_step"] = ad.max_step;
    }
    run["method"] = method;
    run["max_steps"] = mf.ctrl.max_steps;
    run["n_paths"] = mf.n_paths;
    run["master_seed"] = mf.master_seed;
    run["eps_drift"] = mf.detection.eps_drift;
    run["eps_deriv"] = mf.detection.eps_deriv;
    run["window_fraction"] = mf.detection.window_fraction;
    run["initial"] = dump_rv(mf.initial);
    root["run"] = run;
    return root;
}

inline std::string serialize_model(const ModelFile& mf) { return model_to_json(mf).dump(2) + "\n"; }

inline bool step_control_equal(const StepControl& a, const StepControl& b) {
    if (a.t_end != b.t_end || a.max_steps != b.max_steps || a.method.index() != b.method.index()) return false;
    if (const auto* fa = std::get_if<StepControl::Rk4Fixed>(&a.method))
        return fa->h == std::get<StepControl::Rk4Fixed>(b.method).h;
    const auto& aa = std::get<StepControl::Rk45Adaptive>(a.method);
    const auto& ab = std::get<StepControl::Rk45Adaptive>(b.method);
    return aa.rel_tol == ab.rel_tol && aa.abs_tol == ab.abs_tol && aa.max_step == ab.max_step;
}

inline bool model_files_equal(const ModelFile& a, const ModelFile& b) {
    return a.name == b.name && rdm_structurally_equal(a.base, b.base) && a.interventions == b.interventions &&
           a.t0 == b.t0 && step_control_equal(a.ctrl, b.ctrl) && a.n_paths == b.n_paths &&
           a.master_seed == b.master_seed && a.detection.eps_drift == b.detection.eps_drift &&
           a.detection.eps_deriv == b.detection.eps_deriv &&
           a.detection.window_fraction == b.detection.window_fraction && a.initial == b.initial;
}

// ---- graph fixtures -----------------------------------------------------------

inline Json graph_to_json(const DirectedMixedGraph& g) {
    Json j;
    j["nodes"] = Json::array();
    for (const auto& n : g.nodes()) j["nodes"].push_back(n);
    j["directed"] = Json::array();
    for (const auto& [a, b] : g.directed_edges()) j["directed"].push_back(Json::array({g.nodes()[a], g.nodes()[b]}));
    j["bidirected"] = Json::array();
    for (const auto& [a, b] : g.bidirected_edges())
        j["bidirected"].push_back(Json::array({g.nodes()[a], g.nodes()[b]}));
    return j;
}

inline DirectedMixedGraph graph_from_json(const Json& j) {
    model_io_detail::check_keys(j, "graph", {"nodes", "directed", "bidirected"}, {"nodes"});
    DirectedMixedGraph g;
    for (const auto& n : j.at("nodes")) g.add_node(n.get<std::string>());
    if (j.contains("directed"))
        for (const auto& e : j.at("directed")) g.add_directed(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    if (j.contains("bidirected"))
        for (const auto& e : j.at("bidirected"))
            g.add_bidirected(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return g;
}

// ---- SCM export -------------------------------------------------------------

inline Json scm_to_json(const StructuralCausalModel& scm) {
    using namespace model_io_detail;
    Json root;
    Json endo = Json::array(), exo = Json::array();
    for (const auto& b : scm.endo) {
        Json bj;
        bj["name"] = b.name;
        bj["dim"] = b.dim;
        endo.push_back(bj);
    }
    for (std::size_t j = 0; j < scm.exo.size(); ++j) {
        Json xj;
        xj["name"] = scm.exo[j].name;
        xj["dim"] = scm.exo[j].dim;
        xj["limit"] = dump_rv(scm.exo_star[j]);
        exo.push_back(xj);
    }
    root["endogenous"] = endo;
    root["exogenous"] = exo;
    Json mech;
    if (const auto* lin = std::get_if<LinearMechanism>(&scm.mechanism)) {
        mech["kind"] = "linear";
        mech["A"] = dump_matrix(lin->A);
        if (lin->Gamma.cols() > 0) mech["Gamma"] = dump_matrix(lin->Gamma);
        if (lin->b.size() > 0) mech["b"] = dump_vector(lin->b);
    } else if (const auto* fd = std::get_if<FromDynamicsMechanism>(&scm.mechanism)) {
        mech["kind"] = "equilibrium_map";
        Json active = Json::array();
        for (int i : fd->active) active.push_back(scm.endo[i].name);
        mech["active"] = active;
    } else {
        mech["kind"] = "custom";
    }
    mech["equations"] = pretty_print_scm(scm);
    root["mechanism"] = mech;
    Json fixed;
    for (const auto& [i, spec] : scm.fixed_rows) fixed[scm.endo[i].name] = dump_rv(spec);
    if (!fixed.is_null()) root["fixed_rows"] = fixed;
    return root;
}

}  // namespace dyncausal
