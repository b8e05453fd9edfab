#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tdnn/qp.hpp"

namespace tdnn {

enum class DofLayout { Rt0EdgeFlux, VmsNodal };

/// Blocks of the discrete mixed system
///   [ K_vv  K_pv^T ] [v]   [f_v]
///   [ K_pv  -K_pp  ] [p] = [f_p]
/// K_pp is identically zero for RT0.
struct SaddleSystem {
    Eigen::SparseMatrix<double> K_vv;
    Eigen::SparseMatrix<double> K_pv;
    Eigen::SparseMatrix<double> K_pp;
    Eigen::VectorXd f_v;
    Eigen::VectorXd f_p;
    DofLayout layout = DofLayout::VmsNodal;

    // Bookkeeping for pressure DOFs eliminated by prescribed boundary values
    // (nodal layout). dof_site maps each retained DOF to its site index;
    // fixed_pressure is the full per-site vector holding the prescribed
    // values. Both empty when nothing was eliminated (RT0 layout).
    std::vector<int> dof_site;
    Eigen::VectorXd fixed_pressure;

    int flux_dofs() const { return static_cast<int>(f_v.size()); }
    int pressure_dofs() const { return static_cast<int>(f_p.size()); }
    int pressure_sites() const {
        return fixed_pressure.size() > 0 ? static_cast<int>(fixed_pressure.size())
                                         : pressure_dofs();
    }
    /// Scatters a solved pressure vector back to all sites, filling the
    /// eliminated entries with their prescribed values.
    Eigen::VectorXd expand_pressure(const Eigen::VectorXd& p) const;
};

/// Eliminates the flux block: H = K_pv K_vv^{-1} K_pv^T + K_pp (dense),
/// g = K_pv K_vv^{-1} f_v - f_p. Returns the unconstrained QP
/// min 1/2 p^T H p - p^T g; callers attach bounds as needed.
QuadraticProgram schur_reduce(const SaddleSystem& sys);

/// v = K_vv^{-1} (f_v - K_pv^T p).
Eigen::VectorXd recover_flux(const SaddleSystem& sys, const Eigen::VectorXd& p);

/// Constant term of the dual objective, 1/2 f_v^T K_vv^{-1} f_v.
double dual_constant(const SaddleSystem& sys);

}  // namespace tdnn
