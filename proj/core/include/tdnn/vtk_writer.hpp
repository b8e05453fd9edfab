#pragma once

#include <iosfwd>

#include <Eigen/Dense>

#include "tdnn/mesh.hpp"

namespace tdnn {

// Legacy ASCII VTK unstructured grid with nodal concentration scalars and
// nodal flux vectors (interleaved x,y layout).
void write_vtk_nodal(std::ostream& out, const Mesh& mesh, const Eigen::VectorXd& p,
                     const Eigen::VectorXd& v);

// Same grid with per-element concentration scalars and element-centroid flux
// vectors reconstructed from edge DOFs.
void write_vtk_elementwise(std::ostream& out, const Mesh& mesh, const EdgeTopology& topo,
                           const Eigen::VectorXd& p, const Eigen::VectorXd& v);

}  // namespace tdnn
