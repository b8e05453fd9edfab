#include <cmath>
#include <random>
#include <Eigen/Dense>

#include <doctest.h>

#include "tdnn/errors.hpp"
#include "tdnn/problems.hpp"

using namespace tdnn;

TEST_CASE("heterogeneous tensor matches hand-evaluated points") {
    const Tensor2 a = diffusivity_p1(1.0, 1.0, 0.05);
    CHECK(a.d11 == doctest::Approx(1.05));
    CHECK(a.d12 == doctest::Approx(-0.95));
    CHECK(a.d21 == doctest::Approx(-0.95));
    CHECK(a.d22 == doctest::Approx(1.05));

    const Tensor2 b = diffusivity_p1(0.0, 1.0, 0.05);
    CHECK(b.d11 == doctest::Approx(1.0));
    CHECK(b.d12 == doctest::Approx(0.0));
    CHECK(b.d22 == doctest::Approx(0.05));

    CHECK_THROWS_AS(diffusivity_p1(0.0, 0.0, 0.05), SingularDiffusivity);
    CHECK_THROWS_AS(diffusivity_p1(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("velocity-aligned tensor keeps the velocity as an eigenvector") {
    const Eigen::Vector2d beta{1.0, 1.0};
    const Tensor2 d = diffusivity_p2(beta, 0.1, 0.01);
    const double nb = std::sqrt(2.0);
    CHECK(d.d11 == doctest::Approx(0.01 * nb + 0.09 / nb));  // 0.0777817...
    CHECK(d.d12 == doctest::Approx(0.09 / nb));
    // D beta = a_L ||beta|| beta.
    const Eigen::Vector2d Db = d.apply(beta);
    CHECK(Db.x() == doctest::Approx(0.1 * nb * beta.x()).epsilon(1e-14));
    CHECK(Db.y() == doctest::Approx(0.1 * nb * beta.y()).epsilon(1e-14));

    CHECK_THROWS_AS(diffusivity_p2({0, 0}, 0.1, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(diffusivity_p2(beta, 0.01, 0.1), std::invalid_argument);
}

TEST_CASE("rotated orthotropic tensor has the requested eigenvalues") {
    const Tensor2 d = diffusivity_p3(1.0, 100.0, M_PI / 6.0);
    const Eigen::Matrix2d m = d.matrix();
    CHECK(d.d12 == doctest::Approx(std::cos(M_PI / 6) * std::sin(M_PI / 6) * (1.0 - 100.0)));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    CHECK(es.eigenvalues()(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS_AS(diffusivity_p3(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("indicator forcing covers exactly the center box") {
    CHECK(forcing_box(0.5, 0.5) == 1.0);
    CHECK(forcing_box(0.375, 0.625) == 1.0);  // closed box
    CHECK(forcing_box(0.374, 0.5) == 0.0);
    CHECK(forcing_box(0.5, 0.626) == 0.0);
}

TEST_CASE("built-in problems carry the documented data") {
    const ProblemSpec p1 = builtin_problem(1);
    CHECK(p1.domain == Domain::UnitSquare);
    CHECK(p1.forcing_box.has_value());
    CHECK(p1.dirichlet(BoundaryTag::Exterior, 0.3, 0.0) == 0.0);
    CHECK(p1.forcing(0.5, 0.5) == 1.0);

    const ProblemSpec p2 = builtin_problem(2);
    const Tensor2 d2 = p2.diffusivity(0.123, 0.987);  // constant field
    CHECK(d2.d11 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(d2.d12 == doctest::Approx(0.09).epsilon(1e-15));
    // (1,1) and (1,-1) are the eigenvectors, ratio 19.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(d2.matrix());
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.19).epsilon(1e-14));

    const ProblemSpec p3 = builtin_problem(3);
    CHECK(p3.domain == Domain::UnitSquareWithHole);
    CHECK_FALSE(p3.forcing_box.has_value());
    CHECK(p3.forcing(0.77, 0.31) == 0.0);
    CHECK(p3.dirichlet(BoundaryTag::Hole, 4.0 / 9.0, 0.5) == 2.0);
    CHECK(p3.dirichlet(BoundaryTag::Exterior, 0.0, 0.5) == 0.0);

    CHECK_THROWS_AS(builtin_problem(0), std::invalid_argument);
    CHECK_THROWS_AS(builtin_problem(4), std::invalid_argument);
}

TEST_CASE("built-in diffusivities are symmetric positive definite in the domain") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(1e-3, 1.0 - 1e-3);
    for (int id = 1; id <= 3; ++id) {
        const ProblemSpec p = builtin_problem(id);
        for (int k = 0; k < 2000; ++k) {
            const Tensor2 d = p.diffusivity(u(rng), u(rng));
            CHECK(d.d12 == d.d21);
            CHECK(d.d11 > 0.0);
            CHECK(d.det() > 0.0);
        }
    }
}

TEST_CASE("tensor inverse is the matrix inverse") {
    const Tensor2 d{2.0, 0.5, 0.5, 1.0};
    const Tensor2 inv = d.inverse();
    const Eigen::Matrix2d prod = d.matrix() * inv.matrix();
    CHECK(prod.isApprox(Eigen::Matrix2d::Identity(), 1e-14));
    CHECK_THROWS_AS((Tensor2{1, 1, 1, 1}.inverse()), SingularDiffusivity);
}
