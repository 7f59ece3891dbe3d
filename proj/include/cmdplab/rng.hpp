#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace cmdplab {

/// Deterministic counter-based generator (splitmix64). The full generator
/// state is a single 64-bit word, so checkpoints can capture it exactly and
/// identical seeds give bit-identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1); rejects exact zero so logs are safe.
    double next_positive_double() {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return u;
    }

    /// Standard normal via Box-Muller (one value per call, no caching, so
    /// the stream position stays a pure function of the call count).
    double next_normal() {
        double u1 = next_positive_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; smaller shapes use
    /// the boosting identity Gamma(a) = Gamma(a+1) * U^(1/a), which avoids
    /// the numerically fragile direct rejection at small shape.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            double u = next_positive_double();
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = next_positive_double();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
                return d * v;
            }
        }
    }

    /// Dirichlet(alpha, ..., alpha) over `dim` outcomes.
    std::vector<double> next_dirichlet(double alpha, int dim) {
        std::vector<double> g(dim);
        double sum = 0.0;
        for (int i = 0; i < dim; ++i) {
            g[i] = next_gamma(alpha);
            sum += g[i];
        }
        for (int i = 0; i < dim; ++i) g[i] /= sum;
        return g;
    }

    /// Index in [0, n) from a single draw.
    int next_index(int n) {
        return static_cast<int>(next_double() * n);
    }

    /// Sample from a discrete distribution given as contiguous probabilities.
    int next_categorical(const double* probs, int n) {
        double u = next_double();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

}  // namespace cmdplab
