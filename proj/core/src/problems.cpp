#include "tdnn/problems.hpp"

#include <cmath>

#include "tdnn/errors.hpp"

namespace tdnn {

Tensor2 Tensor2::inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-14)
        throw SingularDiffusivity("diffusivity tensor numerically singular (det = " +
                                  std::to_string(d) + ")");
    return {d22 / d, -d12 / d, -d21 / d, d11 / d};
}

Tensor2 diffusivity_p1(double x, double y, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    const Tensor2 d{y * y + eps * x * x, -(1.0 - eps) * x * y, -(1.0 - eps) * x * y,
                    eps * y * y + x * x};
    if (d.det() < 1e-14)
        throw SingularDiffusivity("problem #1 diffusivity singular at (" + std::to_string(x) +
                                  ", " + std::to_string(y) + ")");
    return d;
}

Tensor2 diffusivity_p2(const Eigen::Vector2d& beta, double a_L, double a_T) {
    const double nb = beta.norm();
    if (nb <= 0.0) throw std::invalid_argument("beta must be nonzero");
    if (!(a_L >= a_T && a_T > 0.0)) throw std::invalid_argument("need a_L >= a_T > 0");
    const double c = (a_L - a_T) / nb;
    return {a_T * nb + c * beta.x() * beta.x(), c * beta.x() * beta.y(),
            c * beta.x() * beta.y(), a_T * nb + c * beta.y() * beta.y()};
}

Tensor2 diffusivity_p3(double k1, double k2, double theta) {
    if (k1 <= 0.0 || k2 <= 0.0) throw std::invalid_argument("k1, k2 must be positive");
    // R(theta) diag(k1, k2) R(theta)^T with the k1-eigenvector at angle theta.
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * c * k1 + s * s * k2, c * s * (k1 - k2), c * s * (k1 - k2),
            s * s * k1 + c * c * k2};
}

double forcing_box(double x, double y) {
    return (x >= 0.375 && x <= 0.625 && y >= 0.375 && y <= 0.625) ? 1.0 : 0.0;
}

ProblemSpec builtin_problem(int id) {
    ProblemSpec p;
    switch (id) {
        case 1:
            p.diffusivity = [](double x, double y) { return diffusivity_p1(x, y, 0.05); };
            p.forcing = forcing_box;
            p.forcing_box = Rect{0.375, 0.375, 0.625, 0.625};
            p.dirichlet = [](BoundaryTag, double, double) { return 0.0; };
            p.domain = Domain::UnitSquare;
            p.params = {{"eps", 0.05}};
            break;
        case 2: {
            // a_T I + (a_L - a_T) beta (x) beta for beta = (1,1); eigenpairs
            // (0.19, (1,1)) and (0.01, (1,-1)).
            const Tensor2 d{0.1, 0.09, 0.09, 0.1};
            p.diffusivity = [d](double, double) { return d; };
            p.forcing = forcing_box;
            p.forcing_box = Rect{0.375, 0.375, 0.625, 0.625};
            p.dirichlet = [](BoundaryTag, double, double) { return 0.0; };
            p.domain = Domain::UnitSquare;
            p.params = {{"a_L", 0.1}, {"a_T", 0.01}, {"beta_x", 1.0}, {"beta_y", 1.0}};
            break;
        }
        case 3: {
            const Tensor2 d = diffusivity_p3(1.0, 100.0, M_PI / 6.0);
            p.diffusivity = [d](double, double) { return d; };
            p.forcing = [](double, double) { return 0.0; };
            p.dirichlet = [](BoundaryTag tag, double, double) {
                return tag == BoundaryTag::Hole ? 2.0 : 0.0;
            };
            p.domain = Domain::UnitSquareWithHole;
            p.params = {{"k1", 1.0}, {"k2", 100.0}, {"theta", M_PI / 6.0}};
            break;
        }
        default:
            throw std::invalid_argument("unknown builtin problem id " + std::to_string(id));
    }
    return p;
}

}  // namespace tdnn
