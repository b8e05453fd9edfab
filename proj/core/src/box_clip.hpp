#pragma once

#include <vector>

#include <Eigen/Core>

#include "tdnn/problems.hpp"

namespace tdnn::detail {

// Clip a convex polygon against the half-plane keep = {x : sign*(x[axis]) <= sign*level}.
inline std::vector<Eigen::Vector2d> clip_half_plane(const std::vector<Eigen::Vector2d>& poly,
                                                    int axis, double level, double sign) {
    std::vector<Eigen::Vector2d> out;
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d& p = poly[i];
        const Eigen::Vector2d& q = poly[(i + 1) % n];
        const double dp = sign * (p[axis] - level);
        const double dq = sign * (q[axis] - level);
        if (dp <= 0) out.push_back(p);
        if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

inline std::vector<Eigen::Vector2d> clip_box(std::vector<Eigen::Vector2d> poly,
                                             const Rect& box) {
    poly = clip_half_plane(poly, 0, box.x0, -1.0);
    if (!poly.empty()) poly = clip_half_plane(poly, 0, box.x1, +1.0);
    if (!poly.empty()) poly = clip_half_plane(poly, 1, box.y0, -1.0);
    if (!poly.empty()) poly = clip_half_plane(poly, 1, box.y1, +1.0);
    return poly;
}

inline double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
    double a = 0;
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d& p = poly[i];
        const Eigen::Vector2d& q = poly[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

}  // namespace tdnn::detail
