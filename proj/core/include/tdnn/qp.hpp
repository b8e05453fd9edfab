#pragma once

#include <vector>

#include <Eigen/Dense>

namespace tdnn {

/// Bound-constrained convex quadratic program:
///   minimize 1/2 p^T H p - p^T g   subject to   lower <= p <= upper.
/// Bounds may be -inf / +inf componentwise.
struct QuadraticProgram {
    Eigen::MatrixXd H;
    Eigen::VectorXd g;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int dim() const { return static_cast<int>(g.size()); }
    double objective(const Eigen::VectorXd& p) const {
        return 0.5 * p.dot(H * p) - p.dot(g);
    }
    void validate() const;  // throws std::invalid_argument

    static QuadraticProgram unbounded(Eigen::MatrixXd H, Eigen::VectorXd g);
};

struct QpSolution {
    Eigen::VectorXd p;
    std::vector<int> active_set;   // indices at a bound, sorted
    Eigen::VectorXd multipliers;   // (Hp - g)_i on active lower bounds, negated on upper
    int iterations = 0;
    double objective = 0.0;
    std::vector<double> objective_trace;  // one entry per active-set iteration
};

/// Solves Hp = g by symmetric factorization. Throws NotSpd.
Eigen::VectorXd solve_unconstrained(const QuadraticProgram& qp);

/// Primal active-set method. `init` is the initial working set (indices
/// pinned at a bound); empty means the working set starts empty with the
/// clamped unconstrained solution as feasible start. Deterministic: the
/// bound with the most negative multiplier is released, and the smallest
/// index wins among tied blocking constraints.
QpSolution active_set_solve(const QuadraticProgram& qp, const std::vector<int>& init = {});

/// Exhaustive oracle: enumerates every bound-assignment pattern (free /
/// at-lower / at-upper per coordinate) and returns the best feasible
/// stationary point. Requires dim <= 14.
QpSolution brute_force_solve(const QuadraticProgram& qp);

struct KktReport {
    double feasibility = 0.0;      // max bound violation
    double stationarity = 0.0;     // max |(Hp - g)_i| over free indices
    double dual_feasibility = 0.0; // max(0, -min multiplier)
    double complementarity = 0.0;  // max |lambda_i * (p_i - bound_i)|
};

KktReport kkt_residuals(const QuadraticProgram& qp, const QpSolution& sol);

}  // namespace tdnn
