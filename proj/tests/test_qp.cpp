#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "tdnn/errors.hpp"
#include "tdnn/qp.hpp"

using namespace tdnn;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

QuadraticProgram random_qp(std::mt19937& rng, int n) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    QuadraticProgram qp;
    qp.H = A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(n, n);
    qp.g = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return gauss(rng); });
    qp.lower = Eigen::VectorXd::Constant(n, -kInf);
    qp.upper = Eigen::VectorXd::Constant(n, kInf);
    for (int i = 0; i < n; ++i) {
        const double r = u(rng);
        if (r < 0.4) {
            qp.lower(i) = gauss(rng);
        } else if (r < 0.7) {
            qp.lower(i) = gauss(rng);
            qp.upper(i) = qp.lower(i) + std::abs(gauss(rng)) + 0.1;
        } else if (r < 0.85) {
            qp.upper(i) = gauss(rng);
        }
    }
    return qp;
}
}  // namespace

TEST_CASE("hand-solved bound-constrained minimizer") {
    QuadraticProgram qp;
    qp.H = Eigen::Matrix2d::Identity();
    qp.g = Eigen::Vector2d(-1.0, 2.0);
    qp.lower = Eigen::Vector2d(0.0, 0.0);
    qp.upper = Eigen::Vector2d(kInf, kInf);
    // Unconstrained minimizer is (-1, 2); clipping the first coordinate at 0.
    const QpSolution sol = active_set_solve(qp);
    CHECK(sol.p(0) == doctest::Approx(0.0));
    CHECK(sol.p(1) == doctest::Approx(2.0));
    REQUIRE(sol.active_set.size() == 1);
    CHECK(sol.active_set[0] == 0);
    CHECK(sol.multipliers(0) == doctest::Approx(1.0));  // (Hp - g)_0 = 0 - (-1)
    CHECK(sol.objective == doctest::Approx(-2.0));
}

TEST_CASE("unconstrained solve requires a positive definite Hessian") {
    QuadraticProgram qp = QuadraticProgram::unbounded(
        (Eigen::Matrix2d() << 1, 2, 2, 1).finished(), Eigen::Vector2d(1, 1));
    CHECK_THROWS_AS(solve_unconstrained(qp), NotSpd);
}

TEST_CASE("validation rejects inconsistent programs") {
    QuadraticProgram qp;
    qp.H = Eigen::Matrix2d::Identity();
    qp.g = Eigen::Vector2d(0, 0);
    qp.lower = Eigen::Vector2d(1.0, 0.0);
    qp.upper = Eigen::Vector2d(0.0, 1.0);  // lower > upper
    CHECK_THROWS_AS(qp.validate(), std::invalid_argument);
    qp.upper = Eigen::Vector2d(2.0, 2.0);
    CHECK_NOTHROW(qp.validate());
    qp.g = Eigen::Vector3d(0, 0, 0);
    CHECK_THROWS_AS(qp.validate(), std::invalid_argument);
}

TEST_CASE("objective decreases monotonically along the active-set trace") {
    std::mt19937 rng(11);
    for (int t = 0; t < 50; ++t) {
        const QuadraticProgram qp = random_qp(rng, 8);
        const QpSolution sol = active_set_solve(qp);
        for (size_t k = 1; k < sol.objective_trace.size(); ++k)
            CHECK(sol.objective_trace[k] <= sol.objective_trace[k - 1] + 1e-12);
    }
}

TEST_CASE("active-set solver agrees with exhaustive enumeration") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> dims(1, 10);
    for (int t = 0; t < 1000; ++t) {
        const QuadraticProgram qp = random_qp(rng, dims(rng));
        const QpSolution sol = active_set_solve(qp);
        const QpSolution oracle = brute_force_solve(qp);
        REQUIRE(sol.p.size() == oracle.p.size());
        CHECK((sol.p - oracle.p).cwiseAbs().maxCoeff() <= 1e-8);

        // Warm starting from the violated set reaches the same point.
        const Eigen::VectorXd unc =
            qp.H.ldlt().solve(qp.g);
        std::vector<int> warm;
        for (int i = 0; i < qp.dim(); ++i)
            if (unc(i) < qp.lower(i) || unc(i) > qp.upper(i)) warm.push_back(i);
        const QpSolution sol2 = active_set_solve(qp, warm);
        CHECK((sol2.p - oracle.p).cwiseAbs().maxCoeff() <= 1e-8);

        const KktReport rep = kkt_residuals(qp, sol);
        CHECK(rep.feasibility <= 1e-10);
        CHECK(rep.stationarity <= 1e-8);
        CHECK(rep.dual_feasibility <= 1e-8);
        CHECK(rep.complementarity <= 1e-8);
    }
}

TEST_CASE("exhaustive oracle refuses large instances") {
    std::mt19937 rng(3);
    const QuadraticProgram qp = random_qp(rng, 15);
    CHECK_THROWS_AS(brute_force_solve(qp), std::invalid_argument);
}

TEST_CASE("box bounds pin every coordinate when tight") {
    QuadraticProgram qp;
    qp.H = Eigen::Matrix3d::Identity();
    qp.g = Eigen::Vector3d(5.0, -5.0, 0.25);
    qp.lower = Eigen::Vector3d::Constant(-1.0);
    qp.upper = Eigen::Vector3d::Constant(1.0);
    const QpSolution sol = active_set_solve(qp);
    CHECK(sol.p(0) == doctest::Approx(1.0));
    CHECK(sol.p(1) == doctest::Approx(-1.0));
    CHECK(sol.p(2) == doctest::Approx(0.25));
}
