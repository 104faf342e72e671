#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "clv/cocycle.hpp"
#include "clv/geometry.hpp"
#include "clv/rng.hpp"

using namespace clv;

TEST_CASE("propagate basics") {
    CocyclePtr c = diagonal_cocycle({1.0, -1.0});
    CHECK(propagate(*c, 0.0, c->origin())
              .isApprox(Eigen::MatrixXd::Identity(2, 2)));

    Eigen::MatrixXd d5 = propagate(*c, 5.0, c->origin());
    CHECK(d5(0, 0) == doctest::Approx(std::exp(5.0)).epsilon(1e-12));
    CHECK(d5(1, 1) == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
    CHECK(std::abs(d5(0, 1)) == 0.0);

    Eigen::MatrixXd back = propagate(*c, -3.0, c->origin());
    CHECK(back(0, 0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
}

TEST_CASE("propagate overflow guard") {
    CocyclePtr c = diagonal_cocycle({350.0, -350.0});
    CHECK_THROWS_AS(propagate(*c, 3.0, c->origin()), CocycleOverflowError);
}

TEST_CASE("rotating cocycle formula") {
    CocyclePtr c = rotating_cocycle(0.5, -0.5,
                                    TimeDomain::continuous_time(0.05));
    // R(0) = R(1) = I makes Phi(1, 0) = D.
    Eigen::MatrixXd phi = propagate(*c, 1.0, 0.0);
    Eigen::Matrix2d d;
    d << std::exp(0.5), 0, 0, std::exp(-0.5);
    CHECK((phi - d).cwiseAbs().maxCoeff() < 1e-12);

    // Composition matches the closed form R(w+t) D^t R(-w).
    double w = 0.31, t = 2.35;
    Eigen::MatrixXd lhs = propagate(*c, t, w);
    double a = 2.0 * M_PI;
    Eigen::Matrix2d rwt, rw;
    rwt << std::cos(a * (w + t)), -std::sin(a * (w + t)),
        std::sin(a * (w + t)), std::cos(a * (w + t));
    rw << std::cos(a * w), std::sin(a * w), -std::sin(a * w), std::cos(a * w);
    Eigen::Matrix2d dt;
    dt << std::exp(0.5 * t), 0, 0, std::exp(-0.5 * t);
    CHECK((lhs - rwt * dt * rw).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("svd_ordered") {
    SvdResult id = svd_ordered(Eigen::MatrixXd::Identity(3, 3));
    CHECK(id.singular.isApproxToConstant(1.0, 1e-14));

    Eigen::Matrix2d a;
    a << std::exp(2.0), 0, 0, std::exp(-1.0);
    SvdResult sa = svd_ordered(a);
    CHECK(sa.singular(0) == doctest::Approx(std::exp(2.0)));
    CHECK(sa.singular(1) == doctest::Approx(std::exp(-1.0)));
    CHECK(std::abs(sa.left(0, 0)) == doctest::Approx(1.0));

    Rng rng(5);
    Eigen::MatrixXd r(5, 5);
    for (int i = 0; i < 5; ++i) r.row(i) = rng.gaussian_vector(5).transpose();
    SvdResult sr = svd_ordered(r);
    CHECK((sr.reconstruct() - r).norm() / r.norm() < 1e-10);
    for (int j = 0; j + 1 < 5; ++j) CHECK(sr.singular(j) >= sr.singular(j + 1));

    Eigen::Matrix2d singular;
    singular << 1, 0, 0, 0;
    CHECK_THROWS_AS(svd_ordered(singular), SingularMatrixError);

    DegeneracyPattern pattern({2, 3});
    CHECK(sr.group_min(pattern, 0) == sr.singular(1));
    CHECK(sr.group_max(pattern, 1) == sr.singular(2));
}

TEST_CASE("wedge_norm") {
    CHECK(wedge_norm(Eigen::MatrixXd::Identity(4, 4), 2) ==
          doctest::Approx(1.0));
    Eigen::Matrix3d d3 = Eigen::Vector3d(3, 2, 1).asDiagonal();
    CHECK(wedge_norm(d3, 2) == doctest::Approx(6.0));
    CHECK_THROWS_AS(wedge_norm(d3, 0), DimensionError);
    CHECK_THROWS_AS(wedge_norm(d3, 4), DimensionError);

    // Submultiplicativity on random pairs.
    Rng rng(9);
    for (int it = 0; it < 20; ++it) {
        Eigen::MatrixXd a(4, 4), b(4, 4);
        for (int i = 0; i < 4; ++i) {
            a.row(i) = rng.gaussian_vector(4).transpose();
            b.row(i) = rng.gaussian_vector(4).transpose();
        }
        for (int k = 1; k <= 4; ++k)
            CHECK(wedge_norm(a * b, k) <=
                  wedge_norm(a, k) * wedge_norm(b, k) + 1e-9);
    }
}

TEST_CASE("finite_time_les") {
    SUBCASE("diagonal cocycle is exact") {
        CocyclePtr c = diagonal_cocycle({1.0, -1.0});
        for (double t : {1.0, 7.0, 40.0, 100.0}) {
            Eigen::VectorXd les = finite_time_les(*c, c->origin(), t);
            CHECK(les(0) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(les(1) == doctest::Approx(-1.0).epsilon(1e-12));
        }
    }
    SUBCASE("rotating cocycle: rotations are isometries") {
        CocyclePtr c = rotating_cocycle(0.5, -0.5);
        Eigen::VectorXd les = finite_time_les(*c, 0.13, 40.0);
        CHECK(std::abs(les(0) - 0.5) < 1e-8);
        CHECK(std::abs(les(1) + 0.5) < 1e-8);
    }
    SUBCASE("identity cocycle gives zeros") {
        CocyclePtr c = diagonal_cocycle({0.0, 0.0, 0.0});
        Eigen::VectorXd les = finite_time_les(*c, c->origin(), 25.0);
        CHECK(les.cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("analytic Oseledets data") {
    SUBCASE("diagonal") {
        CocyclePtr c = diagonal_cocycle({1.0, 0.0, -1.0});
        OseledetsData data = c->analytic_oseledets();
        CHECK(data.spectrum.pattern.sizes() == std::vector<int>{1, 1, 1});
        CHECK(data.spectrum.exponents(0) == doctest::Approx(1.0));
        auto e = data.spaces(c->origin());
        for (int i = 0; i < 3; ++i)
            CHECK(distance(e[static_cast<size_t>(i)],
                           Subspace::standard(3, {i})) < 1e-14);
        // E_i = V_i cap V^- characterization (0-based filtrations).
        for (int i = 0; i < 3; ++i) {
            Subspace cap = intersect_alternating(
                data.forward_filtration(i, c->origin()),
                data.backward_filtration(i, c->origin()), 1e-10);
            CHECK(distance(cap, e[static_cast<size_t>(i)]) < 1e-9);
        }
    }
    SUBCASE("diagonal with repeats groups equal rates") {
        CocyclePtr c = diagonal_cocycle({-1.0, 2.0, -1.0});
        OseledetsData data = c->analytic_oseledets();
        CHECK(data.spectrum.pattern.sizes() == std::vector<int>{1, 2});
        CHECK(data.spectrum.exponents(0) == doctest::Approx(2.0));
        auto e = data.spaces(c->origin());
        CHECK(distance(e[1], Subspace::standard(3, {0, 2})) < 1e-14);
    }
    SUBCASE("rotating at w = 0.25") {
        CocyclePtr c = rotating_cocycle(0.5, -0.5);
        auto e = c->analytic_oseledets().spaces(0.25);
        // R(0.25) rotates e1 by pi/2 onto e2.
        CHECK(distance(e[0], Subspace::standard(2, {1})) < 1e-12);
        CHECK(distance(e[1], Subspace::standard(2, {0})) < 1e-12);
    }
    SUBCASE("degenerate rotating blocks") {
        CocyclePtr c = degenerate_rotating_cocycle(0.5, -0.5, 0.05);
        OseledetsData data = c->analytic_oseledets();
        CHECK(data.spectrum.pattern.sizes() == std::vector<int>{2, 2});
        auto e = data.spaces(0.0);
        CHECK(e[0].dim() == 2);
        CHECK(distance(e[0], Subspace::standard(4, {0, 1})) < 1e-14);
    }
    SUBCASE("non-analytic cocycles refuse") {
        CocyclePtr c = random_product_cocycle(3, 1);
        CHECK_THROWS_AS(c->analytic_oseledets(), UnsupportedError);
    }
}

TEST_CASE("builtin constructor validation") {
    CHECK_THROWS_AS(diagonal_cocycle({}), ConfigError);
    CHECK_THROWS_AS(rotating_cocycle(-0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(make_cocycle("nosuch", {}, TimeDomain::discrete_time()),
                    ConfigError);
    CHECK(make_cocycle("rotating", {0.5, -0.5}, TimeDomain::discrete_time())
              ->dim() == 2);
}

TEST_CASE("random product cocycle") {
    CocyclePtr a = random_product_cocycle(3, 42);
    CocyclePtr b = random_product_cocycle(3, 42);
    State w0 = a->origin();
    CHECK(propagate(*a, 4.0, w0).isApprox(propagate(*b, 4.0, w0)));

    // Invertibility guard: every draw is well conditioned.
    for (std::int64_t idx : {0, 1, 5, -3}) {
        Eigen::MatrixXd m = a->step(1.0, State(idx));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        CHECK(svd.singularValues()(0) / svd.singularValues()(2) <= 1e12);
    }

    // Phi(n, w) is the product of n draws.
    Eigen::MatrixXd prod = a->step(1.0, State(std::int64_t{2})) *
                           a->step(1.0, State(std::int64_t{1})) *
                           a->step(1.0, State(std::int64_t{0}));
    CHECK(propagate(*a, 3.0, w0).isApprox(prod, 1e-12));

    // Different seeds give different draws.
    CocyclePtr c = random_product_cocycle(3, 43);
    CHECK_FALSE(propagate(*c, 1.0, w0).isApprox(propagate(*a, 1.0, w0), 1e-6));
}

TEST_CASE("Lorenz-63 tangent cocycle") {
    CocyclePtr c = lorenz63_cocycle(10.0, 28.0, 8.0 / 3.0, 1e-3, 20.0);
    State w0 = c->origin();

    CHECK(propagate(*c, 0.0, w0).isApprox(Eigen::MatrixXd::Identity(3, 3)));

    // Constant divergence: det Phi(t) = exp(-(sigma+1+beta) t).
    double t = 1.0;
    Eigen::MatrixXd phi = propagate(*c, t, w0);
    double expected = std::exp(-(10.0 + 1.0 + 8.0 / 3.0) * t);
    CHECK(std::abs(phi.determinant() / expected - 1.0) < 1e-6);

    // Cocycle identity within 1e-6 at step 1e-3.
    double s = 0.4;
    Eigen::MatrixXd lhs = propagate(*c, s + t, w0);
    Eigen::MatrixXd rhs = propagate(*c, s, c->flow(t, w0)) * phi;
    CHECK((lhs - rhs).norm() / lhs.norm() < 1e-6);

    CHECK(c->flow_direction(w0).norm() > 0);
    CHECK_THROWS_AS(diagonal_cocycle({1.0})->flow_direction(std::monostate{}),
                    UnsupportedError);
}

TEST_CASE("reversed cocycle") {
    CocyclePtr c = rotating_cocycle(0.5, -0.5);
    CocyclePtr r = reversed(c);
    CHECK(r->step(1.0, 0.4).isApprox(c->step(-1.0, 0.4)));
    State moved = r->flow(2.0, 0.4);
    CHECK(std::get<double>(moved) ==
          doctest::Approx(std::get<double>(c->flow(-2.0, 0.4))));
}

TEST_CASE("state type mismatches are rejected") {
    CocyclePtr c = rotating_cocycle(0.5, -0.5);
    CHECK_THROWS_AS(c->step(1.0, State(std::monostate{})), ConfigError);
    CHECK_THROWS_AS(
        diagonal_cocycle({1.0, 2.0})->snap_time(0.5), ConfigError);
}
