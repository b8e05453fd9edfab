#include "tdnn/rt0.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <stdexcept>

#include "tdnn/errors.hpp"

#include "box_clip.hpp"

namespace tdnn {

namespace {

double triangle_area(const Eigen::Matrix<double, 3, 2>& c) {
    return 0.5 * ((c(1, 0) - c(0, 0)) * (c(2, 1) - c(0, 1)) -
                  (c(2, 0) - c(0, 0)) * (c(1, 1) - c(0, 1)));
}

// Area of triangle intersected with the axis-aligned box.
double clipped_area(const Eigen::Matrix<double, 3, 2>& c, const Rect& box) {
    std::vector<Eigen::Vector2d> poly = detail::clip_box(
        {c.row(0).transpose(), c.row(1).transpose(), c.row(2).transpose()}, box);
    if (poly.empty()) return 0;
    return std::abs(detail::polygon_area(poly));
}

}  // namespace

Eigen::Vector2d rt0_basis(const Eigen::Matrix<double, 3, 2>& coords, int i,
                          double sigma, const Eigen::Vector2d& x) {
    const double area = triangle_area(coords);
    if (area <= 0) throw InvalidElement("rt0_basis: non-positive element area");
    const Eigen::Vector2d pi = coords.row(i).transpose();
    return sigma / (2.0 * area) * (x - pi);
}

Eigen::Matrix3d local_mass_matrix_rt0(const Eigen::Matrix<double, 3, 2>& coords,
                                      const std::array<double, 3>& sigma,
                                      const DiffusivityField& D_at) {
    const double area = triangle_area(coords);
    if (area <= 0) throw InvalidElement("local_mass_matrix_rt0: non-positive area");

    // Quadrature at edge midpoints, weight area/3 each. Edge i is opposite
    // vertex i, so its midpoint is the average of the other two vertices.
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    for (int q = 0; q < 3; ++q) {
        const Eigen::Vector2d xq =
            0.5 * (coords.row((q + 1) % 3) + coords.row((q + 2) % 3)).transpose();
        const Tensor2 Dinv = D_at(xq.x(), xq.y()).inverse();
        Eigen::Matrix<double, 2, 3> phi;
        for (int i = 0; i < 3; ++i)
            phi.col(i) = rt0_basis(coords, i, sigma[i], xq);
        M += (area / 3.0) * phi.transpose() * Dinv.matrix() * phi;
    }
    return M;
}

SaddleSystem assemble_rt0(const Mesh& mesh, const EdgeTopology& topo,
                          const ProblemSpec& problem) {
    if (mesh.kind != ElementKind::Triangle)
        throw UnsupportedElement("assemble_rt0: RT0 requires a triangular mesh");
    const bool has_hole = std::any_of(
        mesh.boundary.begin(), mesh.boundary.end(),
        [](const auto& kv) { return kv.second == BoundaryTag::Hole; });
    if ((problem.domain == Domain::UnitSquareWithHole) != has_hole)
        throw std::invalid_argument("assemble_rt0: mesh domain does not match problem domain");

    const int n_edges = static_cast<int>(topo.edges.size());
    const int n_elems = static_cast<int>(mesh.elements.size());

    SaddleSystem sys;
    sys.layout = DofLayout::Rt0EdgeFlux;
    sys.K_vv.resize(n_edges, n_edges);
    sys.K_pv.resize(n_elems, n_edges);
    sys.K_pp.resize(n_elems, n_elems);
    sys.f_v = Eigen::VectorXd::Zero(n_edges);
    sys.f_p = Eigen::VectorXd::Zero(n_elems);

    std::vector<Eigen::Triplet<double>> vv_trip;
    std::vector<Eigen::Triplet<double>> pv_trip;
    vv_trip.reserve(9 * n_elems);
    pv_trip.reserve(3 * n_elems);

    for (int e = 0; e < n_elems; ++e) {
        Eigen::Matrix<double, 3, 2> coords;
        for (int i = 0; i < 3; ++i)
            coords.row(i) = mesh.nodes[mesh.elements[e][i]].transpose();
        std::array<double, 3> sig{};
        for (int i = 0; i < 3; ++i)
            sig[i] = static_cast<double>(topo.sigma[e][i]);

        const Eigen::Matrix3d M = local_mass_matrix_rt0(coords, sig, problem.diffusivity);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                vv_trip.emplace_back(topo.edge_of_element[e][i],
                                     topo.edge_of_element[e][j], M(i, j));

        // -(q, div v): div phi_i = sigma_i / area, integrated against q = 1.
        for (int i = 0; i < 3; ++i)
            pv_trip.emplace_back(e, topo.edge_of_element[e][i], -sig[i]);

        // -(q, f): forcing integrated exactly for box indicators, otherwise
        // with the mid-edge rule.
        const double area = triangle_area(coords);
        double load;
        if (problem.forcing_box) {
            load = clipped_area(coords, *problem.forcing_box);
        } else {
            load = 0;
            for (int q = 0; q < 3; ++q) {
                const Eigen::Vector2d xq =
                    0.5 * (coords.row((q + 1) % 3) + coords.row((q + 2) % 3)).transpose();
                load += (area / 3.0) * problem.forcing(xq.x(), xq.y());
            }
        }
        sys.f_p[e] -= load;
    }

    // Weak Dirichlet data: f_v[e] = -(phi_e . n, c^D) over the boundary edge.
    // phi_e . n is constant with integral sigma, so the edge midpoint value of
    // the data multiplies sigma exactly for edgewise-linear data.
    for (size_t k = 0; k < topo.boundary_edges.size(); ++k) {
        const int ge = topo.boundary_edges[k].first;
        const BoundaryTag tag = topo.boundary_edges[k].second;
        const int elem = topo.boundary_edge_element[k];
        int local = -1;
        for (int i = 0; i < 3; ++i)
            if (topo.edge_of_element[elem][i] == ge) local = i;
        if (local < 0) throw TopologyError("assemble_rt0: inconsistent edge topology");
        const Eigen::Vector2d mid =
            0.5 * (mesh.nodes[topo.edges[ge][0]] + mesh.nodes[topo.edges[ge][1]]);
        sys.f_v[ge] -= topo.sigma[elem][local] * problem.dirichlet(tag, mid.x(), mid.y());
    }

    sys.K_vv.setFromTriplets(vv_trip.begin(), vv_trip.end());
    sys.K_pv.setFromTriplets(pv_trip.begin(), pv_trip.end());
    sys.K_vv.makeCompressed();
    sys.K_pv.makeCompressed();
    sys.K_pp.setZero();
    return sys;
}

}  // namespace tdnn
