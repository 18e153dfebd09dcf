#pragma once

#include "dyncausal/random_variable.hpp"
#include "dyncausal/rng.hpp"
#include "dyncausal/types.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace dyncausal {

// One sample path evaluated on a time grid.
struct Trajectory {
    Vector times;   // strictly increasing
    Matrix values;  // rows follow times, columns the stacked state
    int path_id = 0;
    std::uint64_t seed = 0;
};

// Time-indexed stochastic process with a declared t->infinity limit. Every
// variant has continuous sample paths and converges by construction, so any
// model assembled from these specs satisfies the steadiness requirements of
// the downstream equilibrium analysis.
//
// Draw order per realization (one Rng seeded per path sub-stream):
//   constant:           value
//   deterministic_path: (none)
//   exp_transient:      limit, then amplitude
//   ramp_to:            limit, then start
// The limit draw always comes first, so the sampled limit of a process equals
// the sample of its limit variable under the same seed.
class ProcessSpec {
  public:
    struct Constant {
        RandomVariableSpec rv;
    };
    // Piecewise-linear interpolation through (t, value) knots; constant before
    // the first and after the last knot. The declared limit must equal the
    // final knot value, which makes the limit exact rather than asymptotic.
    struct DeterministicPath {
        std::vector<std::pair<double, Vector>> knots;
        Vector limit;
    };
    // value(t) = limit + amplitude * exp(-rate * t)
    struct ExpTransient {
        RandomVariableSpec limit;
        RandomVariableSpec amplitude;
        double rate = 1.0;
    };
    // Linear ramp from start to limit over [0, settle_time]; exactly constant
    // at the limit for t >= settle_time.
    struct RampTo {
        RandomVariableSpec limit;
        double settle_time = 1.0;
        RandomVariableSpec start;
    };

    static ProcessSpec constant(RandomVariableSpec rv) {
        ProcessSpec p;
        p.dim_ = rv.dimension();
        p.var_ = Constant{std::move(rv)};
        return p;
    }
    static ProcessSpec constant_value(Vector v) { return constant(RandomVariableSpec::point_mass(std::move(v))); }

    static ProcessSpec deterministic_path(std::vector<std::pair<double, Vector>> knots, Vector limit) {
        if (knots.empty()) throw std::invalid_argument("deterministic_path needs at least one knot");
        const int dim = static_cast<int>(limit.size());
        double prev = -std::numeric_limits<double>::infinity();
        for (const auto& [t, v] : knots) {
            if (v.size() != dim) throw std::invalid_argument("deterministic_path knot dimension mismatch");
            if (!(t > prev)) throw std::invalid_argument("deterministic_path knots must have increasing times");
            prev = t;
        }
        if ((knots.back().second - limit).cwiseAbs().maxCoeff() > 0.0)
            throw std::invalid_argument("deterministic_path limit must equal the final knot value");
        ProcessSpec p;
        p.dim_ = dim;
        p.var_ = DeterministicPath{std::move(knots), std::move(limit)};
        return p;
    }

    static ProcessSpec exp_transient(RandomVariableSpec limit, RandomVariableSpec amplitude, double rate) {
        if (limit.dimension() != amplitude.dimension())
            throw std::invalid_argument("exp_transient limit/amplitude dimensions differ");
        if (!(rate > 0.0)) throw std::invalid_argument("exp_transient rate must be positive");
        ProcessSpec p;
        p.dim_ = limit.dimension();
        p.var_ = ExpTransient{std::move(limit), std::move(amplitude), rate};
        return p;
    }

    static ProcessSpec ramp_to(RandomVariableSpec limit, double settle_time) {
        Vector zero = Vector::Zero(limit.dimension());
        return ramp_to(std::move(limit), settle_time, RandomVariableSpec::point_mass(zero));
    }
    static ProcessSpec ramp_to(RandomVariableSpec limit, double settle_time, RandomVariableSpec start) {
        if (!(settle_time > 0.0)) throw std::invalid_argument("ramp_to settle_time must be positive");
        if (limit.dimension() != start.dimension())
            throw std::invalid_argument("ramp_to limit/start dimensions differ");
        ProcessSpec p;
        p.dim_ = limit.dimension();
        p.var_ = RampTo{std::move(limit), settle_time, std::move(start)};
        return p;
    }

    int dimension() const { return dim_; }

    template <class T>
    bool holds() const {
        return std::holds_alternative<T>(var_);
    }
    template <class T>
    const T& get() const {
        return std::get<T>(var_);
    }

    // The random variable this process converges to.
    RandomVariableSpec limit_spec() const {
        if (auto* c = std::get_if<Constant>(&var_)) return c->rv;
        if (auto* d = std::get_if<DeterministicPath>(&var_)) return RandomVariableSpec::point_mass(d->limit);
        if (auto* e = std::get_if<ExpTransient>(&var_)) return e->limit;
        return std::get<RampTo>(var_).limit;
    }

    friend bool operator==(const ProcessSpec& a, const ProcessSpec& b) {
        if (a.dim_ != b.dim_ || a.var_.index() != b.var_.index()) return false;
        if (auto* c = std::get_if<Constant>(&a.var_)) return c->rv == std::get<Constant>(b.var_).rv;
        if (auto* d = std::get_if<DeterministicPath>(&a.var_)) {
            const auto& o = std::get<DeterministicPath>(b.var_);
            if (d->knots.size() != o.knots.size() || !exact_equal(d->limit, o.limit)) return false;
            for (std::size_t i = 0; i < d->knots.size(); ++i)
                if (d->knots[i].first != o.knots[i].first || !exact_equal(d->knots[i].second, o.knots[i].second))
                    return false;
            return true;
        }
        if (auto* e = std::get_if<ExpTransient>(&a.var_)) {
            const auto& o = std::get<ExpTransient>(b.var_);
            return e->limit == o.limit && e->amplitude == o.amplitude && e->rate == o.rate;
        }
        const auto& r = std::get<RampTo>(a.var_);
        const auto& o = std::get<RampTo>(b.var_);
        return r.limit == o.limit && r.settle_time == o.settle_time && r.start == o.start;
    }

  private:
    friend class RealizedProcess;
    int dim_ = 0;
    std::variant<Constant, DeterministicPath, ExpTransient, RampTo> var_;
};

// A process with its per-path randomness drawn; evaluation in t is pure.
class RealizedProcess {
  public:
    RealizedProcess() = default;

    RealizedProcess(const ProcessSpec& spec, std::uint64_t seed) : dim_(spec.dimension()) {
        Rng rng(seed);
        if (auto* c = std::get_if<ProcessSpec::Constant>(&spec.var_)) {
            kind_ = Kind::Constant;
            limit_ = c->rv.sample(rng);
        } else if (auto* d = std::get_if<ProcessSpec::DeterministicPath>(&spec.var_)) {
            kind_ = Kind::Path;
            knots_ = d->knots;
            limit_ = d->limit;
        } else if (auto* e = std::get_if<ProcessSpec::ExpTransient>(&spec.var_)) {
            kind_ = Kind::Exp;
            limit_ = e->limit.sample(rng);
            amplitude_ = e->amplitude.sample(rng);
            rate_ = e->rate;
        } else {
            const auto& r = std::get<ProcessSpec::RampTo>(spec.var_);
            kind_ = Kind::Ramp;
            limit_ = r.limit.sample(rng);
            start_ = r.start.sample(rng);
            settle_ = r.settle_time;
        }
    }

    int dimension() const { return dim_; }
    const Vector& limit() const { return limit_; }

    Vector at(double t) const {
        switch (kind_) {
            case Kind::Constant:
                return limit_;
            case Kind::Exp:
                return limit_ + amplitude_ * std::exp(-rate_ * t);
            case Kind::Ramp: {
                if (t <= 0.0) return start_;
                if (t >= settle_) return limit_;
                double u = t / settle_;
                return start_ + u * (limit_ - start_);
            }
            case Kind::Path: {
                if (t <= knots_.front().first) return knots_.front().second;
                if (t >= knots_.back().first) return knots_.back().second;
                for (std::size_t i = 1; i < knots_.size(); ++i) {
                    if (t <= knots_[i].first) {
                        const auto& [t0, v0] = knots_[i - 1];
                        const auto& [t1, v1] = knots_[i];
                        double u = (t - t0) / (t1 - t0);
                        return v0 + u * (v1 - v0);
                    }
                }
                return knots_.back().second;
            }
        }
        throw std::logic_error("unreachable");
    }

  private:
    enum class Kind { Constant, Path, Exp, Ramp };
    Kind kind_ = Kind::Constant;
    int dim_ = 0;
    Vector limit_, amplitude_, start_;
    double rate_ = 0.0, settle_ = 0.0;
    std::vector<std::pair<double, Vector>> knots_;
};

inline RealizedProcess realize_process(const ProcessSpec& spec, std::uint64_t seed) {
    return RealizedProcess(spec, seed);
}

// Evaluates the realized process on a grid. Deterministic in (spec, seed, grid).
inline Trajectory sample_path(const ProcessSpec& spec, std::uint64_t seed, const Vector& grid) {
    if (grid.size() == 0) throw std::invalid_argument("sample_path: empty time grid");
    for (int i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sample_path: grid must be strictly increasing");
    RealizedProcess rp(spec, seed);
    Trajectory traj;
    traj.times = grid;
    traj.seed = seed;
    traj.values.resize(grid.size(), spec.dimension());
    for (int i = 0; i < grid.size(); ++i) traj.values.row(i) = rp.at(grid[i]).transpose();
    return traj;
}

// Sampled value of the t->infinity limit, consistent with sample_path under
// the same seed.
inline Vector limit_variable(const ProcessSpec& spec, std::uint64_t seed) {
    return RealizedProcess(spec, seed).limit();
}

// All offered variants converge by construction.
inline bool is_convergent(const ProcessSpec&) { return true; }

}  // namespace dyncausal
