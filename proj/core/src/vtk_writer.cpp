#include "tdnn/vtk_writer.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "tdnn/rt0.hpp"

namespace tdnn {

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_grid(std::ostream& out, const Mesh& mesh) {
    out << "# vtk DataFile Version 3.0\n";
    out << "tdnn field\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.nodes.size() << " double\n";
    for (const auto& x : mesh.nodes)
        out << fmt17(x.x()) << ' ' << fmt17(x.y()) << " 0\n";
    const int m = mesh.nodes_per_element();
    out << "CELLS " << mesh.elements.size() << ' ' << mesh.elements.size() * (m + 1)
        << "\n";
    for (const auto& el : mesh.elements) {
        out << m;
        for (int i = 0; i < m; ++i) out << ' ' << el[i];
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.elements.size() << "\n";
    const int type = mesh.kind == ElementKind::Triangle ? 5 : 9;
    for (size_t e = 0; e < mesh.elements.size(); ++e) out << type << "\n";
}

}  // namespace

void write_vtk_nodal(std::ostream& out, const Mesh& mesh, const Eigen::VectorXd& p,
                     const Eigen::VectorXd& v) {
    const auto nn = static_cast<Eigen::Index>(mesh.nodes.size());
    if (p.size() != nn || v.size() != 2 * nn)
        throw std::invalid_argument("write_vtk_nodal: field dimension mismatch");
    write_grid(out, mesh);
    out << "POINT_DATA " << nn << "\n";
    out << "SCALARS concentration double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < nn; ++i) out << fmt17(p(i)) << "\n";
    out << "VECTORS flux double\n";
    for (Eigen::Index i = 0; i < nn; ++i)
        out << fmt17(v(2 * i)) << ' ' << fmt17(v(2 * i + 1)) << " 0\n";
}

void write_vtk_elementwise(std::ostream& out, const Mesh& mesh, const EdgeTopology& topo,
                           const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
    const auto ne = static_cast<Eigen::Index>(mesh.elements.size());
    if (p.size() != ne || v.size() != static_cast<Eigen::Index>(topo.edges.size()))
        throw std::invalid_argument("write_vtk_elementwise: field dimension mismatch");
    write_grid(out, mesh);
    out << "CELL_DATA " << ne << "\n";
    out << "SCALARS concentration double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (Eigen::Index e = 0; e < ne; ++e) out << fmt17(p(e)) << "\n";
    out << "VECTORS flux double\n";
    for (Eigen::Index e = 0; e < ne; ++e) {
        Eigen::Matrix<double, 3, 2> coords;
        for (int i = 0; i < 3; ++i)
            coords.row(i) = mesh.nodes[mesh.elements[e][i]].transpose();
        const Eigen::Vector2d c = mesh.centroid(static_cast<int>(e));
        Eigen::Vector2d flux = Eigen::Vector2d::Zero();
        for (int i = 0; i < 3; ++i)
            flux += v(topo.edge_of_element[e][i]) *
                    rt0_basis(coords, i, topo.sigma[e][i], c);
        out << fmt17(flux.x()) << ' ' << fmt17(flux.y()) << " 0\n";
    }
}

}  // namespace tdnn
