#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tdnn/mesh.hpp"
#include "tdnn/problems.hpp"
#include "tdnn/qp.hpp"
#include "tdnn/saddle.hpp"
#include "tdnn/vms.hpp"

namespace tdnn {

struct MinViolation {
    double min_value = 0.0;
    int violated = 0;
    int total = 0;
};

// Minimum entry and strict count of entries < threshold - 1e-12.
MinViolation min_and_violations(const Eigen::VectorXd& p, double threshold = 0.0);

// Per-element mass balance r = K_pv v - f_p (edge-flux layout only).
Eigen::VectorXd local_mass_residual(const SaddleSystem& sys, const Eigen::VectorXd& v);

// Net outward flux through the tagged boundary: sum of sigma-corrected edge
// DOFs over boundary edges carrying the tag.
double boundary_flux(const Mesh& mesh, const EdgeTopology& topo,
                     const Eigen::VectorXd& v, BoundaryTag tag);

struct BoundaryMinimumReport {
    double min_dof = 0.0;
    double min_boundary = 0.0;
    bool pass = false;
};

// Discrete minimum principle check: with f >= 0 the solution minimum must not
// drop below the smallest boundary value (tolerance 1e-10).
BoundaryMinimumReport verify_boundary_minimum(const Eigen::VectorXd& p, const Mesh& mesh,
                                              const DirichletData& dirichlet);

enum class Method { Rt0, Vms, Gls };
enum class InitMode { Empty, Violated };

std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

struct RunOptions {
    Method method = Method::Vms;
    int problem = 1;
    bool nonneg = false;
    std::optional<std::pair<double, double>> box;
    double tau = kVmsTau;  // gls only
    InitMode init = InitMode::Empty;
};

struct RunRecord {
    std::string method;
    int problem = 0;
    std::string mesh;
    int n = 0;
    double min_conc = 0.0;
    int violated = 0;
    int total = 0;
    int iters_empty = 0;
    int iters_warm = 0;
    double mass_res_max = 0.0;
    double mass_res_total = 0.0;
    double flux_exterior = 0.0;
    double flux_interior = 0.0;
    double time_assembly_s = 0.0;
    double time_qp_s = 0.0;
};

struct RunResult {
    RunRecord record;
    SaddleSystem sys;
    QuadraticProgram qp;
    Eigen::VectorXd p;  // full site vector (per node / per element), prescribed values included
    Eigen::VectorXd v;
    Eigen::VectorXd mass_residual;  // empty for nodal layout
    KktReport kkt;
    bool constrained = false;
};

// Assembles, reduces, solves (constrained or not) and gathers every metric.
// `mesh_desc` and `n` are carried through into the record.
RunResult run_method(const Mesh& mesh, const RunOptions& opt,
                     const std::string& mesh_desc, int n);

// One record per size, both warm-start modes timed. `make_mesh` builds the
// mesh for a given size. Cells run concurrently up to the TDNN_THREADS cap
// (default 1).
std::vector<RunRecord> convergence_study(const RunOptions& opt,
                                         const std::string& mesh_desc,
                                         const std::function<Mesh(int)>& make_mesh,
                                         const std::vector<int>& sizes);

extern const char* const kCsvHeader;
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

}  // namespace tdnn
