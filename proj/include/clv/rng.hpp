#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace clv {

// Stateless mixing function; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic seed for a (base, a, b, c) tuple. Parallel and serial runs
// that derive per-item seeds this way produce identical results.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// mt19937_64 wrapper that generates doubles by explicit bit manipulation so
// sequences do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller (no cached spare; two uniforms per draw).
    double gaussian();

    Eigen::VectorXd gaussian_vector(int n);

    // Uniform over the solid ball of given radius in R^n.
    Eigen::VectorXd uniform_in_ball(int n, double radius = 1.0);

    // Columns are i.i.d. uniform-in-ball vectors.
    Eigen::MatrixXd uniform_ball_tuple(int dim, int count, double radius = 1.0);

    // Haar-distributed orthogonal matrix.
    Eigen::MatrixXd random_orthogonal(int n);

private:
    std::mt19937_64 gen_;
};

}  // namespace clv
