#include "dyncausal/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace dyncausal;
namespace fs = std::filesystem;

namespace {

std::string model_path(const std::string& name) {
    return std::string(DYNCAUSAL_MODELS_DIR) + "/" + name + ".json";
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("dyncausal_test_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    int code = cli::run_cli(std::move(args), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate writes trajectory, equilibrium and report artifacts") {
    TempDir tmp;
    std::string out;
    int code = run({"simulate", model_path("enzyme"), "--out", tmp.path.string(), "--paths", "6", "--seed", "99"},
                   &out);
    REQUIRE(code == cli::kExitOk);
    REQUIRE(fs::exists(tmp.path / "enzyme_trajectories.csv"));
    REQUIRE(fs::exists(tmp.path / "enzyme_equilibrium.csv"));
    REQUIRE(fs::exists(tmp.path / "enzyme_report.json"));
    std::string eq = slurp(tmp.path / "enzyme_equilibrium.csv");
    REQUIRE(eq.rfind("path_id,equilibrated,S,E,C,P\n", 0) == 0);
    std::string traj = slurp(tmp.path / "enzyme_trajectories.csv");
    REQUIRE(traj.rfind("path_id,t,S,E,C,P\n", 0) == 0);
    Json report = Json::parse(slurp(tmp.path / "enzyme_report.json"));
    REQUIRE(report.at("n_paths") == 6);
    REQUIRE(report.at("n_equilibrated") == 6);
}

TEST_CASE("simulate output is byte-identical across runs and thread counts") {
    TempDir a, b;
    REQUIRE(run({"simulate", model_path("enzyme"), "--out", a.path.string(), "--paths", "8", "--threads", "1"}) == 0);
    REQUIRE(run({"simulate", model_path("enzyme"), "--out", b.path.string(), "--paths", "8", "--threads", "3"}) == 0);
    REQUIRE(slurp(a.path / "enzyme_trajectories.csv") == slurp(b.path / "enzyme_trajectories.csv"));
    REQUIRE(slurp(a.path / "enzyme_equilibrium.csv") == slurp(b.path / "enzyme_equilibrium.csv"));
}

TEST_CASE("an empty interventions block behaves like the observational file") {
    TempDir a, b;
    // enzyme.json has no interventions; add an empty block via a copy
    Json j = Json::parse(slurp(model_path("enzyme")));
    j["interventions"] = Json::array();
    fs::path copy = a.path / "copy.json";
    std::ofstream(copy) << j.dump(2);
    REQUIRE(run({"simulate", model_path("enzyme"), "--out", a.path.string(), "--paths", "5"}) == 0);
    REQUIRE(run({"simulate", copy.string(), "--out", b.path.string(), "--paths", "5"}) == 0);
    REQUIRE(slurp(a.path / "enzyme_equilibrium.csv") == slurp(b.path / "enzyme_equilibrium.csv"));
}

TEST_CASE("derive-scm prints the shifted matrix form for linear models") {
    TempDir tmp;
    Json j;
    j["name"] = "tiny";
    j["endogenous"] = Json::array({Json{{"name", "x"}, {"dim", 1}}});
    j["exogenous"] = Json::array({Json{
        {"name", "e"},
        {"process", Json{{"kind", "constant"}, {"rv", Json{{"kind", "point_mass"}, {"value", Json::array({0.0})}}}}}}});
    j["dynamics"] = Json{{"kind", "linear"}, {"B", Json::array({Json::array({-1.0})})},
                         {"Gamma", Json::array({Json::array({1.0})})}};
    j["run"] = Json{{"t_end", 10.0},
                    {"method", Json{{"kind", "rk45_adaptive"}}},
                    {"n_paths", 1},
                    {"master_seed", 1},
                    {"initial", Json{{"kind", "point_mass"}, {"value", Json::array({0.0})}}}};
    fs::path file = tmp.path / "tiny.json";
    std::ofstream(file) << j.dump(2);

    std::string out;
    REQUIRE(run({"derive-scm", file.string(), "--out", tmp.path.string()}, &out) == 0);
    // A = I + B = 0 for B = -1: the x row keeps only the exogenous term
    REQUIRE(out.find("x = e") != std::string::npos);
    Json scm = Json::parse(slurp(tmp.path / "tiny_scm.json"));
    REQUIRE(scm.at("mechanism").at("A")[0][0] == 0.0);
    REQUIRE(scm.at("solvability").get<std::string>().find("uniquely solvable") == 0);
}

TEST_CASE("derive-scm prints the resolved position balance after eliminating momenta") {
    TempDir tmp;
    std::string out;
    REQUIRE(run({"derive-scm", model_path("oscillator"), "--out", tmp.path.string(), "--marginalize", "P",
                 "--resolve-self-loops"},
                &out) == 0);
    // each mass sits at the spring-weighted mean of its neighbors
    REQUIRE(out.find("Q3 = 0.5*Q2 + 0.5*Q4 + 0.5*l2 - 0.5*l3") != std::string::npos);
    REQUIRE(out.find("Q5 = 0.5*Q4 + 0.5*l4 - 0.5*l5 + 3") != std::string::npos);
    REQUIRE(out.find("uniquely solvable") != std::string::npos);
}

TEST_CASE("derive-scm reports the enzyme as not uniquely solvable") {
    TempDir tmp;
    std::string out;
    REQUIRE(run({"derive-scm", model_path("enzyme"), "--out", tmp.path.string()}, &out) == 0);
    REQUIRE(out.find("not uniquely solvable") != std::string::npos);
}

TEST_CASE("graph surgery through the command line") {
    std::string obs, done;
    REQUIRE(run({"graph", model_path("oscillator_ci"), "--scm", "--marginalize", "P", "--resolve-self-loops"},
                &obs) == 0);
    REQUIRE(run({"graph", model_path("oscillator_do_q3"), "--scm", "--marginalize", "P", "--resolve-self-loops"},
                &done) == 0);
    REQUIRE(obs.find("\"Q2\" -> \"Q3\";") != std::string::npos);
    REQUIRE(done.find("\"Q2\" -> \"Q3\";") == std::string::npos);
    REQUIRE(done.find("\"Q3\" -> \"Q4\";") != std::string::npos);
    REQUIRE(obs.find("\"Q2\" -> \"Q3\" [dir=both];") != std::string::npos);
    REQUIRE(done.find("\"Q2\" -> \"Q3\" [dir=both];") == std::string::npos);

    std::string err;
    REQUIRE(run({"graph", model_path("enzyme"), "--rdm", "--scm"}, nullptr, &err) == cli::kExitUsage);
    REQUIRE(run({"graph", model_path("enzyme")}, nullptr, &err) == cli::kExitUsage);
}

TEST_CASE("checks pass on the bundled models") {
    std::string out;
    REQUIRE(run({"check", "thm2", model_path("enzyme"), "--paths", "12"}, &out) == 0);
    REQUIRE(out.find("PASS") != std::string::npos);
    REQUIRE(run({"check", "thm4", model_path("oscillator_do_q3"), "--paths", "3", "--probes", "8"}, &out) == 0);
    REQUIRE(out.find("PASS") != std::string::npos);
    REQUIRE(run({"check", "prop1", model_path("oscillator"), "--paths", "5"}, &out) == 0);
    REQUIRE(out.find("PASS") != std::string::npos);
    std::string err;
    REQUIRE(run({"check", "thm4", model_path("enzyme")}, nullptr, &err) == cli::kExitUsage);
    REQUIRE(err.find("interventions") != std::string::npos);
}

TEST_CASE("ci-test emits a one-line record and flags missing columns") {
    TempDir tmp;
    REQUIRE(run({"simulate", model_path("enzyme"), "--out", tmp.path.string(), "--paths", "30", "--seed", "7",
                 "--no-trajectories"}) == 0);
    std::string out;
    fs::path eq = tmp.path / "enzyme_equilibrium.csv";
    REQUIRE(run({"ci-test", eq.string(), "--x", "S", "--y", "E"}, &out) == 0);
    REQUIRE(out.rfind("ci-test x=S y=E given=- n=", 0) == 0);
    REQUIRE(out.find("independent=") != std::string::npos);
    std::string err;
    REQUIRE(run({"ci-test", eq.string(), "--x", "S", "--y", "Nope"}, nullptr, &err) == cli::kExitUsage);
    REQUIRE(err.find("no column named") != std::string::npos);
}

TEST_CASE("reproduce rejects unknown figure ids") {
    std::string err;
    REQUIRE(run({"reproduce", "fig99", "--models", DYNCAUSAL_MODELS_DIR}, nullptr, &err) == cli::kExitUsage);
    REQUIRE(err.find("unknown figure id") != std::string::npos);
}

TEST_CASE("reproduce builds the bundled graph artifacts") {
    TempDir tmp;
    std::string out;
    REQUIRE(run({"reproduce", "fig3b", "--models", DYNCAUSAL_MODELS_DIR, "--out", tmp.path.string()}, &out) == 0);
    std::string dot = slurp(tmp.path / "fig3b.dot");
    REQUIRE(dot.find("\"Q3\" -> \"Q2\";") != std::string::npos);
    REQUIRE(dot.find("-> \"Q3\";") == std::string::npos);
    REQUIRE(run({"reproduce", "fig7b", "--models", DYNCAUSAL_MODELS_DIR, "--out", tmp.path.string()}, &out) == 0);
    std::string dot7 = slurp(tmp.path / "fig7b.dot");
    REQUIRE(dot7.find("\"S\" -> \"E\";") != std::string::npos);
    REQUIRE(dot7.find("\"E\" -> \"S\";") == std::string::npos);
}

TEST_CASE("model syntax errors are reported with their position and a usage exit code") {
    TempDir tmp;
    fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{ \"name\": }";
    std::string err;
    REQUIRE(run({"simulate", bad.string(), "--out", tmp.path.string()}, nullptr, &err) == cli::kExitUsage);
    REQUIRE(err.find("line 1") != std::string::npos);
}
