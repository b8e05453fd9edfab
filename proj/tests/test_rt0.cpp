#include <cmath>

#include <doctest.h>

#include "tdnn/errors.hpp"
#include "tdnn/mesh.hpp"
#include "tdnn/problems.hpp"
#include "tdnn/rt0.hpp"
#include "tdnn/saddle.hpp"

using namespace tdnn;

namespace {
const DiffusivityField kIdentity = [](double, double) { return Tensor2{1, 0, 0, 1}; };
}

TEST_CASE("edge basis has unit net flux through its own edge") {
    Eigen::Matrix<double, 3, 2> c;
    c << 0, 0, 1, 0, 0, 1;
    // Edge i is opposite vertex i. Net outflow of basis i through edge i is
    // sigma_i; divergence is constant sigma_i / area.
    for (int i = 0; i < 3; ++i) {
        for (double sigma : {-1.0, 1.0}) {
            const Eigen::Vector2d a = c.row((i + 1) % 3), b = c.row((i + 2) % 3);
            const Eigen::Vector2d mid = 0.5 * (a + b);
            const Eigen::Vector2d t = b - a;
            const Eigen::Vector2d n(t.y(), -t.x());  // length-weighted outward normal
            const double flux = rt0_basis(c, i, sigma, mid).dot(n);
            CHECK(flux == doctest::Approx(sigma));
            // Zero normal component on the other two edges (at their midpoints
            // the tangential edge through vertex i has v || edge).
            const Eigen::Vector2d other = 0.5 * (c.row(i).transpose() + a);
            const Eigen::Vector2d tn(
                (a - c.row(i).transpose()).y(), -(a - c.row(i).transpose()).x());
            CHECK(rt0_basis(c, i, sigma, other).dot(tn) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("element mass matrix is symmetric positive definite") {
    Eigen::Matrix<double, 3, 2> c;
    c << 0.1, 0.2, 0.9, 0.15, 0.4, 0.8;
    const Eigen::Matrix3d m = local_mass_matrix_rt0(c, {1, -1, 1}, kIdentity);
    CHECK(m.isApprox(m.transpose(), 1e-14));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("divergence rows contain only orientation signs") {
    const Mesh mesh = generate_structured_triangular(5, DiagonalOrientation::Plus45);
    const EdgeTopology topo = build_edges(mesh);
    const SaddleSystem sys = assemble_rt0(mesh, topo, builtin_problem(1));
    CHECK(sys.layout == DofLayout::Rt0EdgeFlux);
    CHECK(sys.pressure_dofs() == static_cast<int>(mesh.elements.size()));
    CHECK(sys.flux_dofs() == static_cast<int>(topo.edges.size()));
    for (int k = 0; k < sys.K_pv.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K_pv, k); it; ++it)
            CHECK(std::abs(std::abs(it.value()) - 1.0) <= 1e-14);
    // Each column (edge) touches at most two elements.
    Eigen::VectorXd colcount = Eigen::VectorXd::Zero(sys.flux_dofs());
    for (int k = 0; k < sys.K_pv.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K_pv, k); it; ++it)
            colcount(it.col()) += 1.0;
    CHECK(colcount.maxCoeff() <= 2.0);
}

TEST_CASE("indicator load equals the covered area per element") {
    const Mesh mesh = generate_structured_triangular(9, DiagonalOrientation::Plus45);
    const EdgeTopology topo = build_edges(mesh);
    const SaddleSystem sys = assemble_rt0(mesh, topo, builtin_problem(2));
    CHECK(sys.f_p.sum() == doctest::Approx(-0.0625).epsilon(1e-13));
    for (int e = 0; e < sys.pressure_dofs(); ++e) {
        CHECK(sys.f_p(e) <= 1e-15);
        CHECK(-sys.f_p(e) <= std::abs(mesh.signed_area(e)) + 1e-15);
    }
}

TEST_CASE("solution is exact for linear concentration fields") {
    ProblemSpec p;
    p.diffusivity = [](double, double) { return Tensor2{2, 0.5, 0.5, 1}; };
    p.forcing = [](double, double) { return 0.0; };
    p.dirichlet = [](BoundaryTag, double x, double y) { return 4.0 - x + 2.0 * y; };
    p.domain = Domain::UnitSquare;

    const Mesh mesh = generate_structured_triangular(6, DiagonalOrientation::Minus45);
    const EdgeTopology topo = build_edges(mesh);
    const SaddleSystem sys = assemble_rt0(mesh, topo, p);
    const Eigen::VectorXd c = solve_unconstrained(schur_reduce(sys));
    // Cellwise constants match the exact field at centroids.
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        const Eigen::Vector2d x = mesh.centroid(static_cast<int>(e));
        CHECK(c(e) == doctest::Approx(4.0 - x.x() + 2.0 * x.y()).epsilon(1e-10));
    }
    // The recovered flux has the exact constant normal components: v = -D grad c
    // with grad c = (-1, 2).
    const Eigen::VectorXd v = recover_flux(sys, c);
    const Eigen::Vector2d vexact = -Tensor2{2, 0.5, 0.5, 1}.apply({-1.0, 2.0});
    for (size_t ge = 0; ge < topo.edges.size(); ++ge) {
        const auto [a, b] = std::pair(topo.edges[ge][0], topo.edges[ge][1]);
        const Eigen::Vector2d t = mesh.nodes[b] - mesh.nodes[a];
        const Eigen::Vector2d n(t.y(), -t.x());
        CHECK(v(ge) == doctest::Approx(vexact.dot(n)).epsilon(1e-9));
    }
}

TEST_CASE("quads and mismatched domains are rejected") {
    const Mesh quad = generate_structured_quad(4);
    CHECK_THROWS_AS(build_edges(quad), UnsupportedElement);
    const Mesh tri = generate_structured_triangular(4, DiagonalOrientation::Plus45);
    const EdgeTopology topo = build_edges(tri);
    CHECK_THROWS_AS(assemble_rt0(tri, topo, builtin_problem(3)), std::invalid_argument);
}
