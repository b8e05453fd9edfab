#include "tdnn/vms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tdnn/errors.hpp"

#include "box_clip.hpp"

namespace tdnn {

namespace {

struct QuadraturePoint {
    Eigen::Vector2d x;
    double weight;
    Eigen::VectorXd N;         // shape values
    Eigen::MatrixXd gradN;     // m x 2, physical gradients
};

// 3-point mid-edge rule on a triangle (exact for quadratics).
std::vector<QuadraturePoint> triangle_rule(const std::vector<Eigen::Vector2d>& p) {
    const double area2 = (p[1] - p[0]).x() * (p[2] - p[0]).y() -
                         (p[2] - p[0]).x() * (p[1] - p[0]).y();
    if (area2 <= 0.0) throw InvalidElement("degenerate or inverted triangle");
    const double area = 0.5 * area2;

    Eigen::MatrixXd grad(3, 2);  // constant P1 gradients
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d e = p[(i + 2) % 3] - p[(i + 1) % 3];
        grad.row(i) = Eigen::RowVector2d(-e.y(), e.x()) / area2;
    }

    std::vector<QuadraturePoint> qps;
    for (int i = 0; i < 3; ++i) {
        QuadraturePoint qp;
        qp.x = 0.5 * (p[(i + 1) % 3] + p[(i + 2) % 3]);
        qp.weight = area / 3.0;
        qp.N = Eigen::Vector3d::Zero();
        qp.N((i + 1) % 3) = 0.5;
        qp.N((i + 2) % 3) = 0.5;
        qp.gradN = grad;
        qps.push_back(std::move(qp));
    }
    return qps;
}

// 2x2 Gauss rule on an isoparametric bilinear quad.
std::vector<QuadraturePoint> quad_rule(const std::vector<Eigen::Vector2d>& p) {
    const double gp = 1.0 / std::sqrt(3.0);
    std::vector<QuadraturePoint> qps;
    for (double eta : {-gp, gp}) {
        for (double xi : {-gp, gp}) {
            Eigen::Vector4d N{0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
                              0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)};
            Eigen::MatrixXd dref(4, 2);
            dref << -0.25 * (1 - eta), -0.25 * (1 - xi),  //
                0.25 * (1 - eta), -0.25 * (1 + xi),       //
                0.25 * (1 + eta), 0.25 * (1 + xi),        //
                -0.25 * (1 + eta), 0.25 * (1 - xi);
            Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
            for (int a = 0; a < 4; ++a) J += p[a] * dref.row(a);
            const double detJ = J.determinant();
            if (detJ <= 0.0) throw InvalidElement("degenerate or inverted quad");
            QuadraturePoint qp;
            qp.x = Eigen::Vector2d::Zero();
            for (int a = 0; a < 4; ++a) qp.x += N(a) * p[a];
            qp.weight = detJ;
            qp.N = N;
            qp.gradN = dref * J.inverse();
            qps.push_back(std::move(qp));
        }
    }
    return qps;
}

// Shape values at a physical point: barycentric for triangles, Newton
// inversion of the bilinear map for quads.
Eigen::VectorXd shape_values_at(const std::vector<Eigen::Vector2d>& p, ElementKind kind,
                                const Eigen::Vector2d& x) {
    if (kind == ElementKind::Triangle) {
        auto tri2 = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c) {
            return (b - a).x() * (c - a).y() - (c - a).x() * (b - a).y();
        };
        const double full = tri2(p[0], p[1], p[2]);
        Eigen::VectorXd N(3);
        for (int i = 0; i < 3; ++i) N(i) = tri2(p[(i + 1) % 3], p[(i + 2) % 3], x) / full;
        return N;
    }
    Eigen::Vector2d xi = Eigen::Vector2d::Zero();
    Eigen::VectorXd N(4);
    for (int it = 0; it < 30; ++it) {
        N << 0.25 * (1 - xi.x()) * (1 - xi.y()), 0.25 * (1 + xi.x()) * (1 - xi.y()),
            0.25 * (1 + xi.x()) * (1 + xi.y()), 0.25 * (1 - xi.x()) * (1 + xi.y());
        Eigen::MatrixXd dref(4, 2);
        dref << -0.25 * (1 - xi.y()), -0.25 * (1 - xi.x()),  //
            0.25 * (1 - xi.y()), -0.25 * (1 + xi.x()),       //
            0.25 * (1 + xi.y()), 0.25 * (1 + xi.x()),        //
            -0.25 * (1 + xi.y()), 0.25 * (1 - xi.x());
        Eigen::Vector2d r = -x;
        Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
        for (int a = 0; a < 4; ++a) {
            r += N(a) * p[a];
            J += p[a] * dref.row(a);
        }
        if (r.norm() < 1e-14) break;
        xi -= J.inverse() * r;
    }
    return N;
}

}  // namespace

VmsElementBlocks element_matrices_vms(const std::vector<Eigen::Vector2d>& coords,
                                      ElementKind kind, const DiffusivityField& D_at,
                                      double tau) {
    if (!(tau >= 0.0 && tau < 1.0))
        throw std::invalid_argument("stabilization tau must lie in [0, 1)");
    const int m = kind == ElementKind::Triangle ? 3 : 4;
    if (static_cast<int>(coords.size()) != m)
        throw std::invalid_argument("element_matrices_vms: wrong coordinate count");

    VmsElementBlocks blk;
    blk.K_vv = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    blk.K_pv = Eigen::MatrixXd::Zero(m, 2 * m);
    blk.K_pp = Eigen::MatrixXd::Zero(m, m);

    // Triangles evaluate the tensor at the quadrature points. Quads sample it
    // at the corners and interpolate for the mass term, and use the centroid
    // sample for the stabilization term; corner sampling keeps heterogeneous
    // tensors well defined even when a pointwise sample is singular.
    const bool is_quad = kind == ElementKind::Quad;
    std::array<Eigen::Matrix2d, 4> D_corner;
    Eigen::Matrix2d D_centroid = Eigen::Matrix2d::Zero();
    if (is_quad) {
        Eigen::Vector2d c = 0.25 * (coords[0] + coords[1] + coords[2] + coords[3]);
        D_centroid = D_at(c.x(), c.y()).matrix();
        for (int a = 0; a < 4; ++a) {
            // A singular corner sample contributes nothing; the remaining
            // corners keep the interpolant positive definite at the interior
            // quadrature points.
            try {
                D_corner[a] = D_at(coords[a].x(), coords[a].y()).matrix();
            } catch (const SingularDiffusivity&) {
                D_corner[a].setZero();
            }
        }
    }

    const auto qps = is_quad ? quad_rule(coords) : triangle_rule(coords);
    for (const auto& qp : qps) {
        Eigen::Matrix2d Dinv, Dm;
        if (is_quad) {
            Eigen::Matrix2d Dq = Eigen::Matrix2d::Zero();
            for (int a = 0; a < 4; ++a) Dq += qp.N(a) * D_corner[a];
            Dinv = Dq.inverse();
            Dm = D_centroid;
        } else {
            const Tensor2 D = D_at(qp.x.x(), qp.x.y());
            Dinv = D.inverse().matrix();
            Dm = D.matrix();
        }
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                // (1 - tau) (w; D^{-1} v)
                blk.K_vv.block<2, 2>(2 * a, 2 * b) +=
                    (1.0 - tau) * qp.weight * qp.N(a) * qp.N(b) * Dinv;
                // -(q; div v) - tau (grad q; v)
                for (int i = 0; i < 2; ++i)
                    blk.K_pv(a, 2 * b + i) -=
                        qp.weight * (qp.N(a) * qp.gradN(b, i) + tau * qp.gradN(a, i) * qp.N(b));
                // tau (grad q; D grad c)
                blk.K_pp(a, b) +=
                    tau * qp.weight * (qp.gradN.row(a) * Dm).dot(qp.gradN.row(b));
            }
        }
    }
    return blk;
}

SaddleSystem assemble_vms(const Mesh& mesh, const ProblemSpec& problem, double tau) {
    const bool mesh_has_hole =
        std::any_of(mesh.boundary.begin(), mesh.boundary.end(),
                    [](const auto& kv) { return kv.second == BoundaryTag::Hole; });
    if ((problem.domain == Domain::UnitSquareWithHole) != mesh_has_hole)
        throw std::invalid_argument("mesh/problem domain mismatch");

    const int nn = static_cast<int>(mesh.nodes.size());
    const int m = mesh.nodes_per_element();

    SaddleSystem sys;
    sys.layout = DofLayout::VmsNodal;
    sys.f_v = Eigen::VectorXd::Zero(2 * nn);
    sys.f_p = Eigen::VectorXd::Zero(nn);

    std::vector<Eigen::Triplet<double>> t_vv, t_pv, t_pp;
    std::vector<Eigen::Vector2d> coords(m);
    for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
        const auto& el = mesh.elements[e];
        for (int i = 0; i < m; ++i) coords[i] = mesh.nodes[el[i]];
        const auto blk = element_matrices_vms(coords, mesh.kind, problem.diffusivity, tau);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j)
                        t_vv.emplace_back(2 * el[a] + i, 2 * el[b] + j,
                                          blk.K_vv(2 * a + i, 2 * b + j));
                    t_pv.emplace_back(el[a], 2 * el[b] + i, blk.K_pv(a, 2 * b + i));
                }
                t_pp.emplace_back(el[a], el[b], blk.K_pp(a, b));
            }
        }
        // f_p from -(q; f). Indicator-type forcing is integrated exactly by
        // clipping the element against the box, fanning the clipped polygon
        // into triangles, and applying the mid-edge rule on each (exact for
        // the linear/bilinear shape functions there); otherwise the element
        // quadrature is used.
        if (problem.forcing_box) {
            const auto poly = detail::clip_box(coords, *problem.forcing_box);
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                const Eigen::Vector2d &p0 = poly[0], &p1 = poly[k], &p2 = poly[k + 1];
                const double at = 0.5 * std::abs((p1 - p0).x() * (p2 - p0).y() -
                                                 (p2 - p0).x() * (p1 - p0).y());
                const std::array<Eigen::Vector2d, 3> mids = {
                    0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)};
                for (const auto& xm : mids) {
                    const Eigen::VectorXd N = shape_values_at(coords, mesh.kind, xm);
                    for (int a = 0; a < m; ++a) sys.f_p(el[a]) -= (at / 3.0) * N(a);
                }
            }
        } else {
            const auto qps =
                mesh.kind == ElementKind::Triangle ? triangle_rule(coords) : quad_rule(coords);
            for (const auto& qp : qps) {
                const double f = problem.forcing(qp.x.x(), qp.x.y());
                for (int a = 0; a < m; ++a) sys.f_p(el[a]) -= qp.weight * qp.N(a) * f;
            }
        }
    }

    // f_v from -(w . n; c^p) on Dirichlet boundary edges (2-point Gauss).
    const double gp = 1.0 / std::sqrt(3.0);
    for (const auto& be : boundary_edges_of(mesh)) {
        const Eigen::Vector2d pa = mesh.nodes[be.a], pb = mesh.nodes[be.b];
        const Eigen::Vector2d d = pb - pa;
        const double len = d.norm();
        const Eigen::Vector2d n(d.y() / len, -d.x() / len);  // outward for CCW traversal
        for (double t : {-gp, gp}) {
            const double Na = 0.5 * (1.0 - t), Nb = 0.5 * (1.0 + t);
            const Eigen::Vector2d x = Na * pa + Nb * pb;
            const double cp = problem.dirichlet(be.tag, x.x(), x.y());
            const double w = 0.5 * len;
            for (int i = 0; i < 2; ++i) {
                sys.f_v(2 * be.a + i) -= w * Na * cp * n(i);
                sys.f_v(2 * be.b + i) -= w * Nb * cp * n(i);
            }
        }
    }

    sys.K_vv.resize(2 * nn, 2 * nn);
    sys.K_vv.setFromTriplets(t_vv.begin(), t_vv.end());

    // Boundary concentrations are prescribed, so their pressure DOFs are
    // eliminated: prescribed values move to the right-hand side and only
    // interior DOFs remain in the reduced system (and hence in the QP
    // constraint set).
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(nn);
    std::vector<char> is_fixed(nn, 0);
    for (const auto& [node, tag] : mesh.boundary) {
        is_fixed[node] = 1;
        fixed(node) = problem.dirichlet(tag, mesh.nodes[node].x(), mesh.nodes[node].y());
    }
    std::vector<int> reduced_of(nn, -1);
    for (int i = 0; i < nn; ++i) {
        if (!is_fixed[i]) {
            reduced_of[i] = static_cast<int>(sys.dof_site.size());
            sys.dof_site.push_back(i);
        }
    }
    const int ni = static_cast<int>(sys.dof_site.size());
    sys.fixed_pressure = fixed;

    Eigen::VectorXd f_p_red(ni);
    for (int i = 0; i < ni; ++i) f_p_red(i) = sys.f_p(sys.dof_site[i]);

    std::vector<Eigen::Triplet<double>> t_pv_red, t_pp_red;
    for (const auto& t : t_pv) {
        if (is_fixed[t.row()])
            sys.f_v(t.col()) -= t.value() * fixed(t.row());
        else
            t_pv_red.emplace_back(reduced_of[t.row()], t.col(), t.value());
    }
    for (const auto& t : t_pp) {
        if (is_fixed[t.row()]) continue;
        if (is_fixed[t.col()])
            f_p_red(reduced_of[t.row()]) += t.value() * fixed(t.col());
        else
            t_pp_red.emplace_back(reduced_of[t.row()], reduced_of[t.col()], t.value());
    }

    sys.f_p = std::move(f_p_red);
    sys.K_pv.resize(ni, 2 * nn);
    sys.K_pv.setFromTriplets(t_pv_red.begin(), t_pv_red.end());
    sys.K_pp.resize(ni, ni);
    sys.K_pp.setFromTriplets(t_pp_red.begin(), t_pp_red.end());
    return sys;
}

}  // namespace tdnn
