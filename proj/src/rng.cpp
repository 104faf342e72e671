#include "clv/rng.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace clv {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ (a + 0x9e3779b97f4a7c15ULL));
    s = splitmix64(s ^ (b + 0x6a09e667f3bcc909ULL));
    s = splitmix64(s ^ (c + 0xbb67ae8584caa73bULL));
    return s;
}

double Rng::gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd Rng::gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gaussian();
    return v;
}

Eigen::VectorXd Rng::uniform_in_ball(int n, double radius) {
    Eigen::VectorXd dir = gaussian_vector(n);
    double norm = dir.norm();
    while (norm == 0.0) {  // essentially impossible, but keep it total
        dir = gaussian_vector(n);
        norm = dir.norm();
    }
    double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
    return dir * (r / norm);
}

Eigen::MatrixXd Rng::uniform_ball_tuple(int dim, int count, double radius) {
    Eigen::MatrixXd m(dim, count);
    for (int j = 0; j < count; ++j) m.col(j) = uniform_in_ball(dim, radius);
    return m;
}

Eigen::MatrixXd Rng::random_orthogonal(int n) {
    Eigen::MatrixXd g(n, n);
    for (int j = 0; j < n; ++j) g.col(j) = gaussian_vector(n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

}  // namespace clv
