#include "tdnn/saddle.hpp"

#include <Eigen/SparseCholesky>

#include "tdnn/errors.hpp"

namespace tdnn {

Eigen::VectorXd SaddleSystem::expand_pressure(const Eigen::VectorXd& p) const {
    if (p.size() != pressure_dofs())
        throw std::invalid_argument("expand_pressure: pressure vector size mismatch");
    if (fixed_pressure.size() == 0) return p;
    Eigen::VectorXd full = fixed_pressure;
    for (int i = 0; i < static_cast<int>(dof_site.size()); ++i) full(dof_site[i]) = p(i);
    return full;
}

QuadraticProgram schur_reduce(const SaddleSystem& sys) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.K_vv);
    if (llt.info() != Eigen::Success) throw NotSpd("K_vv failed sparse Cholesky factorization");
    // Dense column solves; the largest study case stays at desk scale.
    Eigen::MatrixXd Kpv_t = Eigen::MatrixXd(sys.K_pv).transpose();
    Eigen::MatrixXd X = llt.solve(Kpv_t);
    Eigen::MatrixXd H = sys.K_pv * X + Eigen::MatrixXd(sys.K_pp);
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::VectorXd g = sys.K_pv * llt.solve(sys.f_v) - sys.f_p;
    return QuadraticProgram::unbounded(std::move(H), std::move(g));
}

Eigen::VectorXd recover_flux(const SaddleSystem& sys, const Eigen::VectorXd& p) {
    if (p.size() != sys.pressure_dofs())
        throw std::invalid_argument("recover_flux: pressure vector size mismatch");
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.K_vv);
    if (llt.info() != Eigen::Success) throw NotSpd("K_vv failed sparse Cholesky factorization");
    return llt.solve(sys.f_v - sys.K_pv.transpose() * p);
}

double dual_constant(const SaddleSystem& sys) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.K_vv);
    if (llt.info() != Eigen::Success) throw NotSpd("K_vv failed sparse Cholesky factorization");
    return 0.5 * sys.f_v.dot(llt.solve(sys.f_v));
}

}  // namespace tdnn
