#pragma once

#include "dyncausal/rng.hpp"
#include "dyncausal/types.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dyncausal {

// Declarative description of a random vector. Sampling is fully determined by
// the declaration and the seed; the draw order per variant is part of the contract
// (point_mass: none, normal: dim standard normals, uniform_box: dim uniforms).
class RandomVariableSpec {
  public:
    enum class Kind { PointMass, Normal, UniformBox };

    static RandomVariableSpec point_mass(Vector value) {
        RandomVariableSpec rv;
        rv.kind_ = Kind::PointMass;
        rv.dim_ = static_cast<int>(value.size());
        rv.mean_ = std::move(value);
        rv.check_dim();
        return rv;
    }
    static RandomVariableSpec point_mass(double value) { return point_mass(Vector::Constant(1, value)); }

    static RandomVariableSpec normal(Vector mean, Matrix covariance) {
        RandomVariableSpec rv;
        rv.kind_ = Kind::Normal;
        rv.dim_ = static_cast<int>(mean.size());
        rv.check_dim();
        if (covariance.rows() != rv.dim_ || covariance.cols() != rv.dim_)
            throw std::invalid_argument("covariance shape does not match mean dimension");
        if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("covariance must be symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> es(covariance);
        if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()))
            throw std::invalid_argument("covariance must be positive semidefinite");
        rv.mean_ = std::move(mean);
        rv.covariance_ = covariance;
        // factor with clamped eigenvalues so PSD (singular) covariances sample cleanly
        Vector lam = es.eigenvalues().cwiseMax(0.0);
        rv.factor_ = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
        return rv;
    }
    static RandomVariableSpec normal(double mean, double stddev) {
        return normal(Vector::Constant(1, mean), Matrix::Constant(1, 1, stddev * stddev));
    }

    static RandomVariableSpec uniform_box(Vector lower, Vector upper) {
        RandomVariableSpec rv;
        rv.kind_ = Kind::UniformBox;
        rv.dim_ = static_cast<int>(lower.size());
        rv.check_dim();
        if (upper.size() != lower.size()) throw std::invalid_argument("uniform_box bounds differ in length");
        if ((upper - lower).minCoeff() < 0.0) throw std::invalid_argument("uniform_box requires lower <= upper");
        rv.lower_ = std::move(lower);
        rv.upper_ = std::move(upper);
        return rv;
    }

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const Vector& value() const { return mean_; }       // point mass
    const Vector& mean() const { return mean_; }        // normal
    const Matrix& covariance() const { return covariance_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    Vector sample(Rng& rng) const {
        switch (kind_) {
            case Kind::PointMass:
                return mean_;
            case Kind::Normal: {
                Vector z(dim_);
                for (int i = 0; i < dim_; ++i) z[i] = rng.normal01();
                return mean_ + factor_ * z;
            }
            case Kind::UniformBox: {
                Vector x(dim_);
                for (int i = 0; i < dim_; ++i) x[i] = rng.uniform(lower_[i], upper_[i]);
                return x;
            }
        }
        throw std::logic_error("unreachable");
    }

    Vector sample(std::uint64_t seed) const {
        Rng rng(seed);
        return sample(rng);
    }

    // Expectation; used for diagnostics and init construction.
    Vector mean_value() const {
        switch (kind_) {
            case Kind::PointMass: return mean_;
            case Kind::Normal: return mean_;
            case Kind::UniformBox: return 0.5 * (lower_ + upper_);
        }
        throw std::logic_error("unreachable");
    }

    bool is_point_mass() const { return kind_ == Kind::PointMass; }

    friend bool operator==(const RandomVariableSpec& a, const RandomVariableSpec& b) {
        if (a.kind_ != b.kind_ || a.dim_ != b.dim_) return false;
        switch (a.kind_) {
            case Kind::PointMass: return exact_equal(a.mean_, b.mean_);
            case Kind::Normal: return exact_equal(a.mean_, b.mean_) && exact_equal(a.covariance_, b.covariance_);
            case Kind::UniformBox: return exact_equal(a.lower_, b.lower_) && exact_equal(a.upper_, b.upper_);
        }
        return false;
    }

  private:
    void check_dim() const {
        if (dim_ <= 0) throw std::invalid_argument("random variable must have positive dimension");
    }

    Kind kind_ = Kind::PointMass;
    int dim_ = 0;
    Vector mean_;
    Matrix covariance_, factor_;
    Vector lower_, upper_;
};

}  // namespace dyncausal
