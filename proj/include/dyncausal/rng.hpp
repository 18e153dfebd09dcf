#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dyncausal {

// SplitMix64 finalizer. Used as the stable, documented hash behind all seed
// derivation: sub-stream seeds depend only on the inputs, never on execution
// order, so ensembles are reproducible under any parallel schedule.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// seed(base, a, b) = sm(sm(sm(base ^ C) ^ sm(a)) ^ sm(b))
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(base ^ 0x6a09e667f3bcc909ull);
    h = splitmix64(h ^ splitmix64(a));
    h = splitmix64(h ^ splitmix64(b));
    return h;
}

// Sub-stream slots within one sample path.
enum class StreamSlot : std::uint64_t {
    InitialState = 1,
    Exogenous = 2,
    Intervened = 3,
    Probe = 4,
};

inline std::uint64_t stream_seed(std::uint64_t path_seed, StreamSlot slot, std::uint64_t index) {
    return derive_seed(path_seed, static_cast<std::uint64_t>(slot), index);
}

// Inverse standard-normal CDF. Acklam's rational approximation polished with
// two Newton steps on erfc, giving ~1 ulp accuracy over (0,1).
inline double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    static const double inv_sqrt2pi = 0.3989422804014326779;
    for (int it = 0; it < 2; ++it) {
        double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
        double pdf = inv_sqrt2pi * std::exp(-0.5 * x * x);
        if (pdf > 0.0) x -= e / pdf;
    }
    return x;
}

// Upper-tail standard-normal quantile, Phi^{-1}(p).
inline double normal_quantile(double p) { return inverse_normal_cdf(p); }

// Deterministic random stream: mt19937_64 for bits, explicit transforms for
// the distributions so draws are stable across standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on the open interval (0,1).
    double uniform01() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // One draw per call (inverse-CDF), so stream positions are easy to reason about.
    double normal01() { return inverse_normal_cdf(uniform01()); }

  private:
    std::mt19937_64 eng_;
};

}  // namespace dyncausal
