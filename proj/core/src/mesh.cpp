#include "tdnn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tdnn/errors.hpp"

namespace tdnn {

namespace {

constexpr double kGeomTol = 1e-12;

std::array<int, 2> sorted_pair(int a, int b) {
    return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a};
}

}  // namespace

std::string to_string(BoundaryTag tag) {
    return tag == BoundaryTag::Exterior ? "exterior" : "hole";
}

std::optional<BoundaryTag> tag_from_string(const std::string& s) {
    if (s == "exterior") return BoundaryTag::Exterior;
    if (s == "hole") return BoundaryTag::Hole;
    return std::nullopt;
}

double Mesh::signed_area(int e) const {
    const auto& el = elements[e];
    const int m = nodes_per_element();
    double a = 0.0;
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d& p = nodes[el[i]];
        const Eigen::Vector2d& q = nodes[el[(i + 1) % m]];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Eigen::Vector2d Mesh::centroid(int e) const {
    const auto& el = elements[e];
    const int m = nodes_per_element();
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int i = 0; i < m; ++i) c += nodes[el[i]];
    return c / m;
}

Mesh generate_structured_triangular(int n_per_side, DiagonalOrientation orientation) {
    if (n_per_side < 2) throw std::invalid_argument("n_per_side must be >= 2");
    const int n = n_per_side;
    Mesh m;
    m.kind = ElementKind::Triangle;
    m.nodes.reserve(static_cast<size_t>(n) * n);
    const double h = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m.nodes.emplace_back(i * h, j * h);

    auto vid = [n](int i, int j) { return j * n + i; };
    m.elements.reserve(2 * static_cast<size_t>(n - 1) * (n - 1));
    for (int j = 0; j < n - 1; ++j) {
        for (int i = 0; i < n - 1; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            if (orientation == DiagonalOrientation::Plus45) {
                m.elements.push_back({v00, v10, v11, -1});
                m.elements.push_back({v00, v11, v01, -1});
            } else {
                m.elements.push_back({v00, v10, v01, -1});
                m.elements.push_back({v10, v11, v01, -1});
            }
        }
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1)
                m.boundary[vid(i, j)] = BoundaryTag::Exterior;
    return m;
}

Mesh generate_structured_quad(int n_per_side) {
    if (n_per_side < 2) throw std::invalid_argument("n_per_side must be >= 2");
    const int n = n_per_side;
    Mesh m;
    m.kind = ElementKind::Quad;
    const double h = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m.nodes.emplace_back(i * h, j * h);
    auto vid = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j < n - 1; ++j)
        for (int i = 0; i < n - 1; ++i)
            m.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1)
                m.boundary[vid(i, j)] = BoundaryTag::Exterior;
    return m;
}

Mesh generate_square_with_hole(int refine) {
    if (refine < 1) throw std::invalid_argument("refine must be >= 1");
    // 9x9 macro grid on [0,1]^2; the center macro cell is the hole [4/9,5/9]^2.
    const int k = refine;
    const int n = 9 * k + 1;  // grid nodes per side
    const double h = 1.0 / (9 * k);

    auto cell_in_hole = [k](int ci, int cj) {
        return ci >= 4 * k && ci < 5 * k && cj >= 4 * k && cj < 5 * k;
    };

    // Keep only nodes referenced by a kept cell.
    std::vector<int> remap(static_cast<size_t>(n) * n, -1);
    Mesh m;
    m.kind = ElementKind::Triangle;
    auto gid = [n](int i, int j) { return j * n + i; };
    auto keep = [&](int i, int j) -> int {
        int& r = remap[gid(i, j)];
        if (r < 0) {
            r = static_cast<int>(m.nodes.size());
            m.nodes.emplace_back(i * h, j * h);
        }
        return r;
    };
    for (int cj = 0; cj < 9 * k; ++cj) {
        for (int ci = 0; ci < 9 * k; ++ci) {
            if (cell_in_hole(ci, cj)) continue;
            const int v00 = keep(ci, cj), v10 = keep(ci + 1, cj);
            const int v01 = keep(ci, cj + 1), v11 = keep(ci + 1, cj + 1);
            m.elements.push_back({v00, v10, v11, -1});
            m.elements.push_back({v00, v11, v01, -1});
        }
    }

    const double lo = 4.0 / 9.0, hi = 5.0 / 9.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int r = remap[gid(i, j)];
            if (r < 0) continue;
            const double x = i * h, y = j * h;
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                m.boundary[r] = BoundaryTag::Exterior;
            } else if (x >= lo - kGeomTol && x <= hi + kGeomTol && y >= lo - kGeomTol &&
                       y <= hi + kGeomTol &&
                       (std::abs(x - lo) < kGeomTol || std::abs(x - hi) < kGeomTol ||
                        std::abs(y - lo) < kGeomTol || std::abs(y - hi) < kGeomTol)) {
                m.boundary[r] = BoundaryTag::Hole;
            }
        }
    }
    return m;
}

std::vector<BoundaryEdge> boundary_edges_of(const Mesh& mesh) {
    // Edge -> (count, traversal orientation of first incidence).
    std::map<std::array<int, 2>, std::pair<int, BoundaryEdge>> edges;
    const int m = mesh.nodes_per_element();
    for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
        for (int i = 0; i < m; ++i) {
            const int a = mesh.elements[e][i];
            const int b = mesh.elements[e][(i + 1) % m];
            auto& slot = edges[sorted_pair(a, b)];
            if (slot.first++ == 0) slot.second = BoundaryEdge{a, b, e, BoundaryTag::Exterior};
        }
    }
    std::vector<BoundaryEdge> out;
    for (auto& [key, slot] : edges) {
        if (slot.first != 1) continue;
        BoundaryEdge be = slot.second;
        auto it = mesh.boundary.find(be.a);
        if (it != mesh.boundary.end()) be.tag = it->second;
        out.push_back(be);
    }
    return out;
}

void validate_mesh(const Mesh& mesh) {
    const int nn = static_cast<int>(mesh.nodes.size());
    const int m = mesh.nodes_per_element();
    for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
        for (int i = 0; i < m; ++i) {
            const int v = mesh.elements[e][i];
            if (v < 0 || v >= nn)
                throw TopologyError("element " + std::to_string(e) + " references node " +
                                    std::to_string(v) + " out of range");
        }
        if (mesh.signed_area(e) <= 0.0)
            throw TopologyError("element " + std::to_string(e) + " has non-positive area");
    }
    // Boundary node set must equal the nodes on single-element edges.
    std::set<int> detected;
    for (const auto& be : boundary_edges_of(mesh)) {
        detected.insert(be.a);
        detected.insert(be.b);
    }
    std::set<int> tagged;
    for (const auto& [node, tag] : mesh.boundary) tagged.insert(node);
    if (detected != tagged)
        throw TopologyError("boundary tags do not match the detected boundary node set");
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file: " + path);

    int lineno = 0;
    auto next_line = [&](std::string& line) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError(path + ":" + std::to_string(lineno) + ": " + what);
    };

    std::string line;
    if (!next_line(line)) throw fail("expected 'nodes N'");
    std::istringstream hs(line);
    std::string kw;
    int nn = 0;
    if (!(hs >> kw >> nn) || kw != "nodes" || nn <= 0) throw fail("expected 'nodes N'");

    Mesh mesh;
    mesh.nodes.reserve(nn);
    for (int i = 0; i < nn; ++i) {
        if (!next_line(line)) throw fail("unexpected end of file in node list");
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x >> y)) throw fail("expected 'x y'");
        mesh.nodes.emplace_back(x, y);
    }

    if (!next_line(line)) throw fail("expected 'elements M tri|quad'");
    std::istringstream es(line);
    int ne = 0;
    std::string ekind;
    if (!(es >> kw >> ne >> ekind) || kw != "elements" || ne <= 0)
        throw fail("expected 'elements M tri|quad'");
    if (ekind == "tri")
        mesh.kind = ElementKind::Triangle;
    else if (ekind == "quad")
        mesh.kind = ElementKind::Quad;
    else
        throw fail("unknown element kind '" + ekind + "'");

    const int m = mesh.nodes_per_element();
    for (int e = 0; e < ne; ++e) {
        if (!next_line(line)) throw fail("unexpected end of file in element list");
        std::istringstream ls(line);
        std::array<int, 4> el{-1, -1, -1, -1};
        for (int i = 0; i < m; ++i)
            if (!(ls >> el[i])) throw fail("expected " + std::to_string(m) + " node indices");
        mesh.elements.push_back(el);
    }

    // Auto-detect boundary, then apply explicit overrides if present.
    // Range/area checks must precede edge extraction.
    const int nnodes = static_cast<int>(mesh.nodes.size());
    for (int e = 0; e < ne; ++e) {
        for (int i = 0; i < m; ++i) {
            const int v = mesh.elements[e][i];
            if (v < 0 || v >= nnodes)
                throw TopologyError(path + ": element " + std::to_string(e) +
                                    " references node " + std::to_string(v) + " out of range");
        }
        if (mesh.signed_area(e) <= 0.0)
            throw TopologyError(path + ": element " + std::to_string(e) +
                                " has non-positive area");
    }
    for (const auto& be : boundary_edges_of(mesh)) {
        mesh.boundary[be.a] = BoundaryTag::Exterior;
        mesh.boundary[be.b] = BoundaryTag::Exterior;
    }

    if (next_line(line)) {
        std::istringstream bs(line);
        int nb = 0;
        if (!(bs >> kw >> nb) || kw != "boundary" || nb < 0)
            throw fail("expected 'boundary B'");
        for (int i = 0; i < nb; ++i) {
            if (!next_line(line)) throw fail("unexpected end of file in boundary list");
            std::istringstream ls(line);
            int node = -1;
            std::string tagname;
            if (!(ls >> node >> tagname)) throw fail("expected 'node_index tag'");
            const auto tag = tag_from_string(tagname);
            if (!tag) throw fail("unknown boundary tag '" + tagname + "'");
            if (node < 0 || node >= nnodes) throw fail("boundary node index out of range");
            mesh.boundary[node] = *tag;
        }
    }

    validate_mesh(mesh);
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char buf[128];
    out << "nodes " << mesh.nodes.size() << "\n";
    for (const auto& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
        out << buf;
    }
    out << "elements " << mesh.elements.size() << ' '
        << (mesh.kind == ElementKind::Triangle ? "tri" : "quad") << "\n";
    const int m = mesh.nodes_per_element();
    for (const auto& el : mesh.elements) {
        for (int i = 0; i < m; ++i) out << el[i] << (i + 1 == m ? '\n' : ' ');
    }
    out << "boundary " << mesh.boundary.size() << "\n";
    for (const auto& [node, tag] : mesh.boundary) out << node << ' ' << to_string(tag) << "\n";
}

double EdgeTopology::edge_length(const Mesh& mesh, int e) const {
    return (mesh.nodes[edges[e][1]] - mesh.nodes[edges[e][0]]).norm();
}

EdgeTopology build_edges(const Mesh& mesh) {
    if (mesh.kind != ElementKind::Triangle)
        throw UnsupportedElement("edge topology requires a triangle mesh");

    EdgeTopology topo;
    std::map<std::array<int, 2>, int> index_of;
    topo.edge_of_element.resize(mesh.elements.size());
    topo.sigma.resize(mesh.elements.size());
    std::vector<int> incidence;  // element count per edge
    std::vector<int> owner;      // last incident element

    for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
        const auto& el = mesh.elements[e];
        for (int i = 0; i < 3; ++i) {
            // Local edge i is opposite vertex i; CCW traversal v_{i+1} -> v_{i+2}.
            const int a = el[(i + 1) % 3];
            const int b = el[(i + 2) % 3];
            const auto key = sorted_pair(a, b);
            auto [it, inserted] = index_of.try_emplace(key, static_cast<int>(topo.edges.size()));
            if (inserted) {
                topo.edges.push_back(key);
                incidence.push_back(0);
                owner.push_back(-1);
            }
            const int idx = it->second;
            topo.edge_of_element[e][i] = idx;
            // Global direction (low -> high index) agrees with CCW traversal
            // exactly when its right-hand normal is outward for this element.
            topo.sigma[e][i] = (a == key[0]) ? +1 : -1;
            ++incidence[idx];
            owner[idx] = e;
        }
    }
    for (int idx = 0; idx < static_cast<int>(topo.edges.size()); ++idx) {
        if (incidence[idx] > 2)
            throw TopologyError("edge shared by more than two elements");
        if (incidence[idx] == 1) {
            const int a = topo.edges[idx][0];
            auto it = mesh.boundary.find(a);
            const BoundaryTag tag = it != mesh.boundary.end() ? it->second : BoundaryTag::Exterior;
            topo.boundary_edges.emplace_back(idx, tag);
            topo.boundary_edge_element.push_back(owner[idx]);
        }
    }
    return topo;
}

namespace {

bool is_axis_rectangle(const Mesh& mesh, int e, double& w, double& h) {
    const auto& el = mesh.elements[e];
    const Eigen::Vector2d d1 = mesh.nodes[el[1]] - mesh.nodes[el[0]];
    const Eigen::Vector2d d2 = mesh.nodes[el[2]] - mesh.nodes[el[1]];
    const Eigen::Vector2d d3 = mesh.nodes[el[3]] - mesh.nodes[el[2]];
    const Eigen::Vector2d d0 = mesh.nodes[el[0]] - mesh.nodes[el[3]];
    auto axis = [](const Eigen::Vector2d& d) {
        return std::abs(d.x()) < kGeomTol || std::abs(d.y()) < kGeomTol;
    };
    if (!axis(d1) || !axis(d2) || !axis(d3) || !axis(d0)) return false;
    if ((d1 + d3).norm() > kGeomTol || (d2 + d0).norm() > kGeomTol) return false;
    w = std::abs(d1.x()) > kGeomTol ? std::abs(d1.x()) : std::abs(d2.x());
    h = std::abs(d1.y()) > kGeomTol ? std::abs(d1.y()) : std::abs(d2.y());
    return w > kGeomTol && h > kGeomTol;
}

// Circumcircle of a CCW triangle: center and squared radius.
void circumcircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                  Eigen::Vector2d& center, double& r2) {
    const Eigen::Vector2d ab = b - a, ac = c - a;
    const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
    const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
    center.x() = a.x() + (ac.y() * ab2 - ab.y() * ac2) / d;
    center.y() = a.y() + (ab.x() * ac2 - ac.x() * ab2) / d;
    r2 = (center - a).squaredNorm();
}

}  // namespace

DmpReport check_dmp_conditions(const Mesh& mesh) {
    DmpReport rep;
    const int ne = static_cast<int>(mesh.elements.size());

    if (mesh.kind == ElementKind::Triangle) {
        rep.nonobtuse_applicable = true;
        rep.nonobtuse = true;
        for (int e = 0; e < ne; ++e) {
            const auto& el = mesh.elements[e];
            // Law of cosines: angle at vertex i is obtuse iff b^2 + c^2 < a^2.
            double s[3];
            for (int i = 0; i < 3; ++i)
                s[i] = (mesh.nodes[el[(i + 1) % 3]] - mesh.nodes[el[(i + 2) % 3]]).squaredNorm();
            for (int i = 0; i < 3; ++i) {
                const double scale = s[0] + s[1] + s[2];
                if (s[(i + 1) % 3] + s[(i + 2) % 3] - s[i] < -kGeomTol * scale) {
                    rep.nonobtuse = false;
                    rep.obtuse_elements.push_back(e);
                    break;
                }
            }
        }

        // Vanselow: Delaunay (empty circumcircle) plus the boundary-midpoint condition.
        rep.vanselow_applicable = true;
        rep.vanselow = true;
        for (int e = 0; e < ne && rep.vanselow; ++e) {
            const auto& el = mesh.elements[e];
            Eigen::Vector2d c;
            double r2;
            circumcircle(mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]], c, r2);
            for (int q = 0; q < static_cast<int>(mesh.nodes.size()); ++q) {
                if (q == el[0] || q == el[1] || q == el[2]) continue;
                if ((mesh.nodes[q] - c).squaredNorm() < r2 * (1.0 - 1e-10)) {
                    rep.vanselow = false;
                    break;
                }
            }
        }
        if (rep.vanselow) {
            for (const auto& be : boundary_edges_of(mesh)) {
                const Eigen::Vector2d mid = 0.5 * (mesh.nodes[be.a] + mesh.nodes[be.b]);
                const double r2 = (mesh.nodes[be.a] - mid).squaredNorm();
                for (int q = 0; q < static_cast<int>(mesh.nodes.size()); ++q) {
                    if (q == be.a || q == be.b) continue;
                    if ((mesh.nodes[q] - mid).squaredNorm() < r2 * (1.0 - 1e-10)) {
                        rep.vanselow = false;
                        rep.vanselow_offenders.push_back({be.a, be.b});
                        break;
                    }
                }
            }
        }
    } else {
        std::vector<double> w(ne), h(ne);
        bool all_rect = true;
        for (int e = 0; e < ne && all_rect; ++e) all_rect = is_axis_rectangle(mesh, e, w[e], h[e]);
        if (all_rect) {
            rep.christie_hall_applicable = true;
            rep.christie_hall = true;
            // Element adjacency through shared edges; each element is also
            // checked against itself (single-element meshes included).
            std::map<std::array<int, 2>, int> first_owner;
            std::vector<std::array<int, 2>> pairs;
            for (int e = 0; e < ne; ++e) {
                pairs.push_back({e, e});
                for (int i = 0; i < 4; ++i) {
                    const auto key =
                        sorted_pair(mesh.elements[e][i], mesh.elements[e][(i + 1) % 4]);
                    auto [it, inserted] = first_owner.try_emplace(key, e);
                    if (!inserted) pairs.push_back({it->second, e});
                }
            }
            // Christie-Hall for neighboring rectangles (h horizontal, k vertical):
            //   h1*h2 <= 2*max(k1^2, k2^2)  and  k1*k2 <= 2*max(h1^2, h2^2).
            // Uniform corollary: k/sqrt(2) <= h <= sqrt(2)*k.
            for (const auto& [ea, eb] : pairs) {
                const double h1 = w[ea], h2 = w[eb], k1 = h[ea], k2 = h[eb];
                const bool ok = h1 * h2 <= 2.0 * std::max(k1 * k1, k2 * k2) + kGeomTol &&
                                k1 * k2 <= 2.0 * std::max(h1 * h1, h2 * h2) + kGeomTol;
                if (!ok) {
                    rep.christie_hall = false;
                    rep.christie_hall_offenders.push_back({ea, eb, h1, h2, k1, k2});
                }
            }
        }
    }

    rep.overall_sufficient = (rep.nonobtuse_applicable && rep.nonobtuse) ||
                             (rep.christie_hall_applicable && rep.christie_hall) ||
                             (rep.vanselow_applicable && rep.vanselow);
    return rep;
}

}  // namespace tdnn
