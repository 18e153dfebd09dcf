#include "dyncausal/process.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dyncausal;

namespace {

Vector grid3() {
    Vector g(3);
    g << 0.0, 1.0, 2.0;
    return g;
}

}  // namespace

TEST_CASE("constant process replays its value on any grid") {
    auto spec = ProcessSpec::constant_value(Vector::Constant(1, 2.0));
    Trajectory tr = sample_path(spec, 1234, grid3());
    for (int i = 0; i < 3; ++i) REQUIRE(tr.values(i, 0) == 2.0);
    REQUIRE(limit_variable(spec, 99)[0] == 2.0);
}

TEST_CASE("exp_transient evaluates limit + amplitude exp(-rate t)") {
    auto spec = ProcessSpec::exp_transient(RandomVariableSpec::point_mass(1.0),
                                           RandomVariableSpec::point_mass(3.0), 1.0);
    Vector g(1);
    g << 0.0;
    Trajectory tr = sample_path(spec, 7, g);
    REQUIRE(tr.values(0, 0) == Catch::Approx(4.0).margin(1e-15));
    REQUIRE(limit_variable(spec, 7)[0] == Catch::Approx(1.0));
}

TEST_CASE("exp_transient with random limit matches the formula with the same draw") {
    // oracle: evaluate the defining formula with the identically seeded draw
    auto limit_rv = RandomVariableSpec::normal(0.0, 1.0);
    auto spec = ProcessSpec::exp_transient(limit_rv, RandomVariableSpec::point_mass(1.0), 2.0);
    const std::uint64_t seed = 424242;
    Vector g(1);
    g << 10.0;
    Trajectory tr = sample_path(spec, seed, g);

    Rng rng(seed);
    double limit_draw = limit_rv.sample(rng)[0];
    double expected = limit_draw + std::exp(-2.0 * 10.0);
    REQUIRE(tr.values(0, 0) == Catch::Approx(expected).margin(0.0));
    REQUIRE(limit_variable(spec, seed)[0] == limit_draw);
}

TEST_CASE("limit of a ramp equals its sampled path at and after the settle time") {
    auto spec = ProcessSpec::ramp_to(RandomVariableSpec::uniform_box(Vector::Zero(1), Vector::Ones(1)), 3.0);
    const std::uint64_t seed = 31337;
    Vector g(3);
    g << 3.0, 5.0, 100.0;
    Trajectory tr = sample_path(spec, seed, g);
    Vector lim = limit_variable(spec, seed);
    for (int i = 0; i < 3; ++i) REQUIRE(tr.values(i, 0) == lim[0]);
    REQUIRE(lim[0] >= 0.0);
    REQUIRE(lim[0] <= 1.0);
}

TEST_CASE("every offered variant is convergent") {
    REQUIRE(is_convergent(ProcessSpec::constant_value(Vector::Zero(2))));
    REQUIRE(is_convergent(ProcessSpec::exp_transient(RandomVariableSpec::point_mass(0.0),
                                                     RandomVariableSpec::point_mass(1.0), 0.5)));
    REQUIRE(is_convergent(ProcessSpec::ramp_to(RandomVariableSpec::point_mass(1.0), 2.0)));
}

TEST_CASE("non-monotone grids are rejected") {
    auto spec = ProcessSpec::constant_value(Vector::Zero(1));
    Vector bad(3);
    bad << 0.0, 2.0, 1.0;
    REQUIRE_THROWS_AS(sample_path(spec, 1, bad), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_path(spec, 1, Vector{}), std::invalid_argument);
}

TEST_CASE("identical (spec, seed, grid) triples give bit-identical paths") {
    auto spec = ProcessSpec::exp_transient(RandomVariableSpec::normal(Vector::Zero(2), Matrix::Identity(2, 2)),
                                           RandomVariableSpec::uniform_box(-Vector::Ones(2), Vector::Ones(2)), 0.7);
    Vector g(5);
    g << 0.0, 0.5, 1.0, 2.0, 4.0;
    Trajectory a = sample_path(spec, 555, g);
    Trajectory b = sample_path(spec, 555, g);
    REQUIRE(exact_equal(a.values.reshaped().eval(), b.values.reshaped().eval()));
    Trajectory c = sample_path(spec, 556, g);
    REQUIRE_FALSE(exact_equal(a.values.reshaped().eval(), c.values.reshaped().eval()));
}

TEST_CASE("transient bound: |path(t) - limit| <= amplitude exp(-rate t)") {
    auto spec = ProcessSpec::exp_transient(RandomVariableSpec::normal(2.0, 0.5),
                                           RandomVariableSpec::uniform_box(Vector::Constant(1, 0.5),
                                                                           Vector::Constant(1, 2.0)),
                                           1.5);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        RealizedProcess rp(spec, seed);
        double amp = std::abs((rp.at(0.0) - rp.limit())[0]);
        Vector g(6);
        g << 0.0, 0.3, 1.0, 2.0, 4.0, 8.0;
        Trajectory tr = sample_path(spec, seed, g);
        Vector lim = limit_variable(spec, seed);
        for (int i = 0; i < g.size(); ++i) {
            double dev = std::abs(tr.values(i, 0) - lim[0]);
            REQUIRE(dev <= amp * std::exp(-1.5 * g[i]) + 1e-12);
        }
    }
}

TEST_CASE("deterministic_path interpolates its knots and is constant after the last") {
    std::vector<std::pair<double, Vector>> knots = {{0.0, Vector::Zero(1)},
                                                    {1.0, Vector::Constant(1, 2.0)},
                                                    {2.0, Vector::Constant(1, 1.0)}};
    auto spec = ProcessSpec::deterministic_path(knots, Vector::Constant(1, 1.0));
    Vector g(4);
    g << 0.5, 1.5, 2.0, 50.0;
    Trajectory tr = sample_path(spec, 0, g);
    REQUIRE(tr.values(0, 0) == Catch::Approx(1.0));
    REQUIRE(tr.values(1, 0) == Catch::Approx(1.5));
    REQUIRE(tr.values(2, 0) == 1.0);
    REQUIRE(tr.values(3, 0) == 1.0);
    REQUIRE_THROWS_AS(ProcessSpec::deterministic_path(knots, Vector::Constant(1, 3.0)), std::invalid_argument);
}

TEST_CASE("independent sub-streams: ensemble mean of normal draws obeys the Monte Carlo rate") {
    // n = 1e4 draws of N(mu, sigma^2); the sample mean must fall inside the
    // 5 sigma / sqrt(n) band around mu.
    const double mu = 1.25, sigma = 2.0;
    auto rv = RandomVariableSpec::normal(mu, sigma);
    const int n = 10000;
    const std::uint64_t master = 20260809;
    double sum = 0.0;
    for (int p = 0; p < n; ++p) {
        std::uint64_t path_seed = derive_seed(master, static_cast<std::uint64_t>(p));
        sum += rv.sample(path_seed)[0];
    }
    double mean = sum / n;
    REQUIRE(std::abs(mean - mu) <= 5.0 * sigma / std::sqrt(double(n)));
}

TEST_CASE("normal covariance sampling respects the declared covariance") {
    Matrix cov(2, 2);
    cov << 2.0, 0.8, 0.8, 1.0;
    auto rv = RandomVariableSpec::normal(Vector::Zero(2), cov);
    const int n = 20000;
    Matrix draws(n, 2);
    for (int p = 0; p < n; ++p) draws.row(p) = rv.sample(derive_seed(5, p)).transpose();
    Matrix centered = draws.rowwise() - draws.colwise().mean();
    Matrix sample_cov = centered.transpose() * centered / double(n - 1);
    REQUIRE((sample_cov - cov).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("random variable validation") {
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 0.0, 1.0;  // asymmetric
    REQUIRE_THROWS_AS(RandomVariableSpec::normal(Vector::Zero(2), bad), std::invalid_argument);
    Matrix neg(1, 1);
    neg << -1.0;
    REQUIRE_THROWS_AS(RandomVariableSpec::normal(Vector::Zero(1), neg), std::invalid_argument);
    REQUIRE_THROWS_AS(RandomVariableSpec::uniform_box(Vector::Ones(1), Vector::Zero(1)), std::invalid_argument);
}
