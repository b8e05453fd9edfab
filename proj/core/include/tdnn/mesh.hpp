#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace tdnn {

enum class ElementKind { Triangle, Quad };
enum class BoundaryTag { Exterior, Hole };

std::string to_string(BoundaryTag tag);
std::optional<BoundaryTag> tag_from_string(const std::string& s);

/// Two-dimensional conforming mesh of triangles or quadrilaterals.
/// Elements are stored counter-clockwise; boundary nodes carry a tag.
struct Mesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 4>> elements;  // [3] == -1 for triangles
    ElementKind kind = ElementKind::Triangle;
    std::map<int, BoundaryTag> boundary;  // node index -> tag

    int nodes_per_element() const { return kind == ElementKind::Triangle ? 3 : 4; }
    double signed_area(int e) const;
    Eigen::Vector2d centroid(int e) const;
};

enum class DiagonalOrientation { Plus45, Minus45 };

Mesh generate_structured_triangular(int n_per_side, DiagonalOrientation orientation);
Mesh generate_structured_quad(int n_per_side);
Mesh generate_square_with_hole(int refine);

Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

// Throws TopologyError if any Mesh invariant is violated.
void validate_mesh(const Mesh& mesh);

/// Boundary edge of any element kind, oriented as in the element's
/// counter-clockwise traversal (outward normal = (dy, -dx)/L).
struct BoundaryEdge {
    int a = -1, b = -1;
    int element = -1;
    BoundaryTag tag = BoundaryTag::Exterior;
};
std::vector<BoundaryEdge> boundary_edges_of(const Mesh& mesh);

/// Oriented edge topology for triangle meshes. Global edge orientation runs
/// from the lower to the higher node index; sigma is +1 on an element when
/// that orientation is outward for the element.
struct EdgeTopology {
    std::vector<std::array<int, 2>> edges;  // a < b
    std::vector<std::array<int, 3>> edge_of_element;
    std::vector<std::array<int, 3>> sigma;
    std::vector<std::pair<int, BoundaryTag>> boundary_edges;  // (edge index, tag)
    std::vector<int> boundary_edge_element;                   // parallel to boundary_edges

    double edge_length(const Mesh& mesh, int e) const;
};

EdgeTopology build_edges(const Mesh& mesh);

/// Appendix sufficiency checks for the discrete maximum principle.
struct DmpReport {
    bool nonobtuse_applicable = false;
    bool nonobtuse = false;
    std::vector<int> obtuse_elements;

    struct RectPair {
        int element_a = -1, element_b = -1;
        double h1 = 0, h2 = 0, k1 = 0, k2 = 0;
    };
    bool christie_hall_applicable = false;
    bool christie_hall = false;
    std::vector<RectPair> christie_hall_offenders;

    bool vanselow_applicable = false;
    bool vanselow = false;
    std::vector<std::array<int, 2>> vanselow_offenders;  // boundary node pairs

    bool overall_sufficient = false;
};

DmpReport check_dmp_conditions(const Mesh& mesh);

}  // namespace tdnn
