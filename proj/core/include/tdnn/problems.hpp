#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "tdnn/mesh.hpp"

namespace tdnn {

/// Symmetric 2x2 diffusivity tensor.
struct Tensor2 {
    double d11 = 0, d12 = 0, d21 = 0, d22 = 0;

    double det() const { return d11 * d22 - d12 * d21; }
    Tensor2 inverse() const;
    Eigen::Matrix2d matrix() const {
        Eigen::Matrix2d m;
        m << d11, d12, d21, d22;
        return m;
    }
    Eigen::Vector2d apply(const Eigen::Vector2d& v) const {
        return {d11 * v.x() + d12 * v.y(), d21 * v.x() + d22 * v.y()};
    }
};

using DiffusivityField = std::function<Tensor2(double, double)>;
using ScalarField = std::function<double(double, double)>;
using DirichletData = std::function<double(BoundaryTag, double, double)>;

enum class Domain { UnitSquare, UnitSquareWithHole };

/// Axis-aligned rectangle (closed), used to flag indicator-type forcing so
/// the RT0 load vector can be integrated exactly by polygon clipping.
struct Rect {
    double x0, y0, x1, y1;
    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
};

struct ProblemSpec {
    DiffusivityField diffusivity;
    ScalarField forcing;
    DirichletData dirichlet;
    Domain domain = Domain::UnitSquare;
    // When set, forcing is exactly the indicator function of this box.
    std::optional<Rect> forcing_box;
    std::map<std::string, double> params;
};

Tensor2 diffusivity_p1(double x, double y, double eps);
Tensor2 diffusivity_p2(const Eigen::Vector2d& beta, double a_L, double a_T);
Tensor2 diffusivity_p3(double k1, double k2, double theta);
double forcing_box(double x, double y);
ProblemSpec builtin_problem(int id);

}  // namespace tdnn
