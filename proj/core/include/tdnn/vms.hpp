#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tdnn/mesh.hpp"
#include "tdnn/problems.hpp"
#include "tdnn/saddle.hpp"

namespace tdnn {

/// Local blocks of the stabilized mixed formulation for one element.
/// Flux DOFs are 2 per node (interleaved x,y); pressure DOFs 1 per node.
struct VmsElementBlocks {
    Eigen::MatrixXd K_vv;  // 2m x 2m
    Eigen::MatrixXd K_pv;  // m x 2m
    Eigen::MatrixXd K_pp;  // m x m
};

/// The stabilization weight tau multiplies the multiscale term; tau = 1/2
/// is the variational multiscale value, other values in [0,1) give the
/// Galerkin/least-squares variant.
constexpr double kVmsTau = 0.5;

VmsElementBlocks element_matrices_vms(const std::vector<Eigen::Vector2d>& coords,
                                      ElementKind kind, const DiffusivityField& D_at,
                                      double tau = kVmsTau);

SaddleSystem assemble_vms(const Mesh& mesh, const ProblemSpec& problem, double tau = kVmsTau);

}  // namespace tdnn
