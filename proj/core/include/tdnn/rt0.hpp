#pragma once

#include <Eigen/Dense>

#include "tdnn/mesh.hpp"
#include "tdnn/problems.hpp"
#include "tdnn/saddle.hpp"

namespace tdnn {

// Lowest-order Raviart-Thomas basis function for local edge `i` (opposite
// vertex `i`) evaluated at `x`.  `coords` are the element vertices in CCW
// order, `sigma` the orientation sign of that edge.
Eigen::Vector2d rt0_basis(const Eigen::Matrix<double, 3, 2>& coords, int i,
                          double sigma, const Eigen::Vector2d& x);

// 3x3 weighted mass matrix (phi_i, D^{-1} phi_j) over the triangle, using the
// three-point mid-edge quadrature rule.
Eigen::Matrix3d local_mass_matrix_rt0(const Eigen::Matrix<double, 3, 2>& coords,
                                      const std::array<double, 3>& sigma,
                                      const DiffusivityField& D_at);

SaddleSystem assemble_rt0(const Mesh& mesh, const EdgeTopology& topo,
                          const ProblemSpec& problem);

}  // namespace tdnn
