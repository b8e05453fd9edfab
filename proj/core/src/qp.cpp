#include "tdnn/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tdnn/errors.hpp"

namespace tdnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rank-one Cholesky update: given lower-triangular B with B B^T = S,
// overwrites B so that B B^T = S + c c^T. Destroys c.
void chol_update(Eigen::Ref<Eigen::MatrixXd> B, Eigen::Ref<Eigen::VectorXd> c) {
    const int m = static_cast<int>(c.size());
    for (int k = 0; k < m; ++k) {
        const double bkk = B(k, k);
        const double r = std::hypot(bkk, c(k));
        const double co = r / bkk;
        const double si = c(k) / bkk;
        B(k, k) = r;
        for (int i = k + 1; i < m; ++i) {
            B(i, k) = (B(i, k) + si * c(i)) / co;
            c(i) = co * c(i) - si * B(i, k);
        }
    }
}

// Working-set solver state. The equality-constrained subproblem
//   min 1/2 x^T H x - g^T x   s.t.  x_A = b_A
// is solved through S = (H^{-1})_{AA}: with xu = H^{-1} g,
//   mu = S^{-1} (xu_A - b_A),   x = xu - (H^{-1} I_A^T) mu,
// and the subproblem gradient is -sum_j mu_j e_{A_j}. S's Cholesky factor
// and the columns W = H^{-1} I_A^T are maintained incrementally.
class WorkingSet {
  public:
    WorkingSet(const Eigen::LLT<Eigen::MatrixXd>& llt, int n) : llt_(llt), n_(n) {}

    int size() const { return m_; }
    int index(int j) const { return idx_[j]; }
    double bound(int j) const { return bval_[j]; }
    bool at_upper(int j) const { return upper_[j]; }
    bool contains(int i) const { return member_.size() == size_t(n_) && member_[i]; }

    void add(int i, double bound_value, bool is_upper) {
        ensure_capacity(m_ + 1);
        Eigen::VectorXd w = llt_.solve(Eigen::VectorXd::Unit(n_, i));
        Eigen::VectorXd s(m_);
        for (int j = 0; j < m_; ++j) s(j) = w(idx_[j]);
        Eigen::VectorXd l =
            L_.topLeftCorner(m_, m_).triangularView<Eigen::Lower>().solve(s);
        const double d2 = w(i) - l.squaredNorm();
        if (!(d2 > 0.0)) throw NotSpd("working-set Schur complement lost definiteness");
        L_.row(m_).head(m_) = l.transpose();
        L_(m_, m_) = std::sqrt(d2);
        W_.col(m_) = w;
        idx_.push_back(i);
        bval_.push_back(bound_value);
        upper_.push_back(is_upper);
        member_[i] = true;
        ++m_;
    }

    void remove(int j) {
        member_[idx_[j]] = false;
        idx_.erase(idx_.begin() + j);
        bval_.erase(bval_.begin() + j);
        upper_.erase(upper_.begin() + j);
        const int tail = m_ - j - 1;
        if (tail > 0) {
            // Delete row/column j of the factor; restore triangularity by a
            // rank-one update of the trailing block with the removed column.
            Eigen::VectorXd c = L_.block(j + 1, j, tail, 1);
            L_.block(j, 0, tail, j) = L_.block(j + 1, 0, tail, j);
            Eigen::MatrixXd B = L_.block(j + 1, j + 1, tail, tail);
            chol_update(B, c);
            L_.block(j, j, tail, tail) = B;
            W_.middleCols(j, tail) = W_.middleCols(j + 1, tail);
        }
        --m_;
    }

    // x_eqp and the subproblem multipliers mu (grad at x_eqp = -I_A^T mu).
    Eigen::VectorXd solve_eqp(const Eigen::VectorXd& xunc, Eigen::VectorXd& mu) const {
        if (m_ == 0) {
            mu.resize(0);
            return xunc;
        }
        Eigen::VectorXd rhs(m_);
        for (int j = 0; j < m_; ++j) rhs(j) = xunc(idx_[j]) - bval_[j];
        auto L = L_.topLeftCorner(m_, m_);
        mu = L.triangularView<Eigen::Lower>().solve(rhs);
        mu = L.transpose().triangularView<Eigen::Upper>().solve(mu);
        Eigen::VectorXd x = xunc - W_.leftCols(m_) * mu;
        for (int j = 0; j < m_; ++j) x(idx_[j]) = bval_[j];
        return x;
    }

  private:
    void ensure_capacity(int m) {
        if (m <= cap_) return;
        const int cap = std::max(2 * cap_, std::max(m, 16));
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(cap, cap);
        L.topLeftCorner(m_, m_) = L_.topLeftCorner(m_, m_);
        L_.swap(L);
        Eigen::MatrixXd W(n_, cap);
        W.leftCols(m_) = W_.leftCols(m_);
        W_.swap(W);
        if (member_.empty()) member_.assign(n_, false);
        cap_ = cap;
    }

    const Eigen::LLT<Eigen::MatrixXd>& llt_;
    int n_;
    int m_ = 0;
    int cap_ = 0;
    Eigen::MatrixXd L_;  // Cholesky factor of S, m x m lower triangular
    Eigen::MatrixXd W_;  // H^{-1} I_A^T, n x m
    std::vector<int> idx_;
    std::vector<double> bval_;
    std::vector<bool> upper_;
    std::vector<bool> member_;
};

}  // namespace

void QuadraticProgram::validate() const {
    const int n = dim();
    if (H.rows() != n || H.cols() != n || lower.size() != n || upper.size() != n)
        throw std::invalid_argument("inconsistent QP dimensions");
    for (int i = 0; i < n; ++i)
        if (!(lower(i) <= upper(i))) throw std::invalid_argument("lower > upper");
}

QuadraticProgram QuadraticProgram::unbounded(Eigen::MatrixXd H, Eigen::VectorXd g) {
    const int n = static_cast<int>(g.size());
    return {std::move(H), std::move(g), Eigen::VectorXd::Constant(n, -kInf),
            Eigen::VectorXd::Constant(n, kInf)};
}

Eigen::VectorXd solve_unconstrained(const QuadraticProgram& qp) {
    Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
    if (llt.info() != Eigen::Success) throw NotSpd("Hessian failed Cholesky factorization");
    return llt.solve(qp.g);
}

QpSolution active_set_solve(const QuadraticProgram& qp, const std::vector<int>& init) {
    qp.validate();
    const int n = qp.dim();
    for (int i : init)
        if (i < 0 || i >= n) throw std::invalid_argument("init index out of range");

    Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
    if (llt.info() != Eigen::Success) throw NotSpd("Hessian failed Cholesky factorization");
    const Eigen::VectorXd xunc = llt.solve(qp.g);
    const double gscale = 1.0 + qp.g.lpNorm<Eigen::Infinity>();
    const double mult_tol = 1e-10 * gscale;

    WorkingSet ws(llt, n);
    Eigen::VectorXd x = xunc.cwiseMax(qp.lower).cwiseMin(qp.upper);
    for (int i : init) {
        if (ws.contains(i)) continue;
        const bool lo = std::isfinite(qp.lower(i));
        const bool hi = std::isfinite(qp.upper(i));
        if (!lo && !hi) throw std::invalid_argument("init index has no finite bound");
        // Pin at the bound nearer the unconstrained minimizer.
        const bool use_upper = hi && (!lo || xunc(i) > 0.5 * (qp.lower(i) + qp.upper(i)));
        const double b = use_upper ? qp.upper(i) : qp.lower(i);
        ws.add(i, b, use_upper);
        x(i) = b;
    }

    QpSolution sol;
    const int max_iter = std::max(10 * n, 10);
    Eigen::VectorXd mu;
    for (int iter = 1; iter <= max_iter; ++iter) {
        sol.iterations = iter;
        const Eigen::VectorXd xeqp = ws.solve_eqp(xunc, mu);
        const Eigen::VectorXd d = xeqp - x;
        const double step_scale = 1.0 + xeqp.lpNorm<Eigen::Infinity>();

        if (d.lpNorm<Eigen::Infinity>() <= 1e-13 * step_scale) {
            // At the subproblem optimum: inspect multipliers.
            int worst = -1;
            double worst_val = -mult_tol;
            for (int j = 0; j < ws.size(); ++j) {
                const double lambda = ws.at_upper(j) ? mu(j) : -mu(j);
                if (lambda < worst_val) {
                    worst_val = lambda;
                    worst = j;
                }
            }
            sol.objective_trace.push_back(qp.objective(x));
            if (worst < 0) break;  // KKT satisfied
            ws.remove(worst);
            continue;
        }

        // Step toward the subproblem optimum up to the first blocking bound.
        double alpha = 1.0;
        for (int i = 0; i < n; ++i) {
            if (ws.contains(i) || d(i) == 0.0) continue;
            if (d(i) < 0.0 && std::isfinite(qp.lower(i)))
                alpha = std::min(alpha, (qp.lower(i) - x(i)) / d(i));
            else if (d(i) > 0.0 && std::isfinite(qp.upper(i)))
                alpha = std::min(alpha, (qp.upper(i) - x(i)) / d(i));
        }
        alpha = std::max(alpha, 0.0);
        int blocking = -1;
        bool block_upper = false;
        if (alpha < 1.0) {
            for (int i = 0; i < n; ++i) {  // smallest index among ties
                if (ws.contains(i) || d(i) == 0.0) continue;
                if (d(i) < 0.0 && std::isfinite(qp.lower(i)) &&
                    (qp.lower(i) - x(i)) / d(i) <= alpha * (1.0 + 1e-12) + 1e-300) {
                    blocking = i;
                    block_upper = false;
                    break;
                }
                if (d(i) > 0.0 && std::isfinite(qp.upper(i)) &&
                    (qp.upper(i) - x(i)) / d(i) <= alpha * (1.0 + 1e-12) + 1e-300) {
                    blocking = i;
                    block_upper = true;
                    break;
                }
            }
        }
        x += alpha * d;
        for (int j = 0; j < ws.size(); ++j) x(ws.index(j)) = ws.bound(j);
        if (blocking >= 0) {
            const double b = block_upper ? qp.upper(blocking) : qp.lower(blocking);
            x(blocking) = b;
            ws.add(blocking, b, block_upper);
        }
        sol.objective_trace.push_back(qp.objective(x));
        if (iter == max_iter)
            throw NoConvergence("active-set iteration cap exceeded (" +
                                std::to_string(max_iter) + ")");
    }

    sol.p = x;
    sol.objective = qp.objective(x);
    for (int j = 0; j < ws.size(); ++j) sol.active_set.push_back(ws.index(j));
    std::sort(sol.active_set.begin(), sol.active_set.end());
    const Eigen::VectorXd grad = qp.H * x - qp.g;
    sol.multipliers = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < ws.size(); ++j) {
        const int i = ws.index(j);
        sol.multipliers(i) = ws.at_upper(j) ? -grad(i) : grad(i);
    }
    return sol;
}

QpSolution brute_force_solve(const QuadraticProgram& qp) {
    qp.validate();
    const int n = qp.dim();
    if (n > 14) throw std::invalid_argument("brute_force_solve: dimension too large (max 14)");

    const double feas_tol = 1e-9 * (1.0 + qp.g.lpNorm<Eigen::Infinity>());
    double best_obj = kInf;
    Eigen::VectorXd best_p;
    std::vector<int> best_pattern;

    std::vector<int> pattern(n, 0);  // 0 free, 1 at lower, 2 at upper
    for (;;) {
        bool valid = true;
        for (int i = 0; i < n && valid; ++i) {
            if (pattern[i] == 1 && !std::isfinite(qp.lower(i))) valid = false;
            if (pattern[i] == 2 && !std::isfinite(qp.upper(i))) valid = false;
        }
        if (valid) {
            std::vector<int> free;
            Eigen::VectorXd p(n);
            for (int i = 0; i < n; ++i) {
                if (pattern[i] == 0)
                    free.push_back(i);
                else
                    p(i) = pattern[i] == 1 ? qp.lower(i) : qp.upper(i);
            }
            const int nf = static_cast<int>(free.size());
            bool solvable = true;
            if (nf > 0) {
                Eigen::MatrixXd Hff(nf, nf);
                Eigen::VectorXd rhs(nf);
                for (int a = 0; a < nf; ++a) {
                    rhs(a) = qp.g(free[a]);
                    for (int b = 0; b < nf; ++b) Hff(a, b) = qp.H(free[a], free[b]);
                    for (int i = 0; i < n; ++i)
                        if (pattern[i] != 0) rhs(a) -= qp.H(free[a], i) * p(i);
                }
                Eigen::LLT<Eigen::MatrixXd> llt(Hff);
                if (llt.info() != Eigen::Success) solvable = false;
                else {
                    const Eigen::VectorXd pf = llt.solve(rhs);
                    for (int a = 0; a < nf; ++a) p(free[a]) = pf(a);
                }
            }
            if (solvable) {
                bool feasible = true;
                for (int i = 0; i < n && feasible; ++i)
                    feasible = p(i) >= qp.lower(i) - feas_tol && p(i) <= qp.upper(i) + feas_tol;
                if (feasible) {
                    const double obj = qp.objective(p);
                    if (obj < best_obj) {
                        best_obj = obj;
                        best_p = p;
                        best_pattern = pattern;
                    }
                }
            }
        }
        int k = 0;
        while (k < n && ++pattern[k] == 3) pattern[k++] = 0;
        if (k == n) break;
    }

    QpSolution sol;
    sol.p = best_p;
    sol.objective = best_obj;
    sol.iterations = 0;
    const Eigen::VectorXd grad = qp.H * best_p - qp.g;
    sol.multipliers = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (best_pattern[i] == 0) continue;
        sol.active_set.push_back(i);
        sol.multipliers(i) = best_pattern[i] == 1 ? grad(i) : -grad(i);
    }
    return sol;
}

KktReport kkt_residuals(const QuadraticProgram& qp, const QpSolution& sol) {
    qp.validate();
    if (sol.p.size() != qp.dim() || sol.multipliers.size() != qp.dim())
        throw std::invalid_argument("kkt_residuals: dimension mismatch");
    const int n = qp.dim();
    KktReport rep;
    std::vector<bool> active(n, false);
    for (int i : sol.active_set) active[i] = true;
    const Eigen::VectorXd grad = qp.H * sol.p - qp.g;
    for (int i = 0; i < n; ++i) {
        double viol = 0.0;
        if (std::isfinite(qp.lower(i))) viol = std::max(viol, qp.lower(i) - sol.p(i));
        if (std::isfinite(qp.upper(i))) viol = std::max(viol, sol.p(i) - qp.upper(i));
        rep.feasibility = std::max(rep.feasibility, viol);
        if (!active[i]) {
            rep.stationarity = std::max(rep.stationarity, std::abs(grad(i)));
        } else {
            rep.dual_feasibility = std::max(rep.dual_feasibility, -sol.multipliers(i));
            const double dl = std::isfinite(qp.lower(i)) ? std::abs(sol.p(i) - qp.lower(i)) : kInf;
            const double du = std::isfinite(qp.upper(i)) ? std::abs(sol.p(i) - qp.upper(i)) : kInf;
            rep.complementarity =
                std::max(rep.complementarity, std::abs(sol.multipliers(i)) * std::min(dl, du));
        }
    }
    return rep;
}

}  // namespace tdnn
