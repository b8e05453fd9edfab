#include "tdnn/diagnostics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "tdnn/errors.hpp"
#include "tdnn/rt0.hpp"
#include "tdnn/vms.hpp"

namespace tdnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<int> violated_indices(const QuadraticProgram& qp, const Eigen::VectorXd& p) {
    std::vector<int> out;
    for (int i = 0; i < qp.dim(); ++i)
        if (p(i) < qp.lower(i) || p(i) > qp.upper(i)) out.push_back(i);
    return out;
}

int study_thread_cap() {
    const char* env = std::getenv("TDNN_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

}  // namespace

MinViolation min_and_violations(const Eigen::VectorXd& p, double threshold) {
    MinViolation mv;
    mv.total = static_cast<int>(p.size());
    mv.min_value = mv.total > 0 ? p.minCoeff() : 0.0;
    for (int i = 0; i < mv.total; ++i)
        if (p(i) < threshold - 1e-12) ++mv.violated;
    return mv;
}

Eigen::VectorXd local_mass_residual(const SaddleSystem& sys, const Eigen::VectorXd& v) {
    if (sys.layout != DofLayout::Rt0EdgeFlux)
        throw std::invalid_argument("local_mass_residual: edge-flux system required");
    if (v.size() != sys.f_v.size())
        throw std::invalid_argument("local_mass_residual: flux dimension mismatch");
    return sys.K_pv * v - sys.f_p;
}

double boundary_flux(const Mesh& mesh, const EdgeTopology& topo,
                     const Eigen::VectorXd& v, BoundaryTag tag) {
    (void)mesh;
    if (v.size() != static_cast<Eigen::Index>(topo.edges.size()))
        throw std::invalid_argument("boundary_flux: flux dimension mismatch");
    double total = 0.0;
    for (size_t k = 0; k < topo.boundary_edges.size(); ++k) {
        if (topo.boundary_edges[k].second != tag) continue;
        const int ge = topo.boundary_edges[k].first;
        const int elem = topo.boundary_edge_element[k];
        for (int i = 0; i < 3; ++i)
            if (topo.edge_of_element[elem][i] == ge)
                total += topo.sigma[elem][i] * v(ge);
    }
    return total;
}

BoundaryMinimumReport verify_boundary_minimum(const Eigen::VectorXd& p, const Mesh& mesh,
                                              const DirichletData& dirichlet) {
    BoundaryMinimumReport rep;
    rep.min_dof = p.size() > 0 ? p.minCoeff() : 0.0;
    rep.min_boundary = kInf;
    for (const auto& [node, tag] : mesh.boundary) {
        const auto& x = mesh.nodes[node];
        rep.min_boundary = std::min(rep.min_boundary, dirichlet(tag, x.x(), x.y()));
    }
    if (!std::isfinite(rep.min_boundary)) rep.min_boundary = 0.0;
    rep.pass = rep.min_dof >= rep.min_boundary - 1e-10;
    return rep;
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Rt0: return "rt0";
        case Method::Vms: return "vms";
        case Method::Gls: return "gls";
    }
    return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
    if (s == "rt0") return Method::Rt0;
    if (s == "vms") return Method::Vms;
    if (s == "gls") return Method::Gls;
    return std::nullopt;
}

RunResult run_method(const Mesh& mesh, const RunOptions& opt,
                     const std::string& mesh_desc, int n) {
    const ProblemSpec problem = builtin_problem(opt.problem);
    RunResult res;
    res.record.method = to_string(opt.method);
    res.record.problem = opt.problem;
    res.record.mesh = mesh_desc;
    res.record.n = n;

    const double t0 = now_seconds();
    EdgeTopology topo;
    if (opt.method == Method::Rt0) {
        topo = build_edges(mesh);
        res.sys = assemble_rt0(mesh, topo, problem);
    } else {
        const double tau = opt.method == Method::Gls ? opt.tau : kVmsTau;
        res.sys = assemble_vms(mesh, problem, tau);
    }
    res.qp = schur_reduce(res.sys);
    Eigen::VectorXd p_unc = solve_unconstrained(res.qp);
    res.record.time_assembly_s = now_seconds() - t0;

    res.constrained = opt.nonneg || opt.box.has_value();
    Eigen::VectorXd p_dof;
    if (res.constrained) {
        const int dim = res.qp.dim();
        if (opt.box) {
            if (!(opt.box->first <= opt.box->second))
                throw std::invalid_argument("box bounds out of order");
            res.qp.lower.setConstant(dim, opt.box->first);
            res.qp.upper.setConstant(dim, opt.box->second);
        } else {
            res.qp.lower.setConstant(dim, 0.0);
        }
        const std::vector<int> warm = violated_indices(res.qp, p_unc);
        const double t1 = now_seconds();
        QpSolution sol_empty = active_set_solve(res.qp);
        QpSolution sol_warm = active_set_solve(res.qp, warm);
        res.record.time_qp_s = now_seconds() - t1;
        res.record.iters_empty = sol_empty.iterations;
        res.record.iters_warm = sol_warm.iterations;
        QpSolution& chosen = opt.init == InitMode::Empty ? sol_empty : sol_warm;
        p_dof = chosen.p;
        res.kkt = kkt_residuals(res.qp, chosen);
    } else {
        p_dof = p_unc;
        QpSolution sol;
        sol.p = p_dof;
        sol.multipliers = Eigen::VectorXd::Zero(res.qp.dim());
        sol.objective = res.qp.objective(p_dof);
        res.kkt = kkt_residuals(res.qp, sol);
    }
    res.v = recover_flux(res.sys, p_dof);
    res.p = res.sys.expand_pressure(p_dof);

    const MinViolation mv = min_and_violations(res.p);
    res.record.min_conc = mv.min_value;
    res.record.violated = mv.violated;
    res.record.total = mv.total;

    if (opt.method == Method::Rt0) {
        res.mass_residual = local_mass_residual(res.sys, res.v);
        res.record.mass_res_max = res.mass_residual.size() > 0
                                      ? res.mass_residual.cwiseAbs().maxCoeff()
                                      : 0.0;
        res.record.mass_res_total = res.mass_residual.sum();
        res.record.flux_exterior = boundary_flux(mesh, topo, res.v, BoundaryTag::Exterior);
        res.record.flux_interior = boundary_flux(mesh, topo, res.v, BoundaryTag::Hole);
    }
    return res;
}

std::vector<RunRecord> convergence_study(const RunOptions& opt,
                                         const std::string& mesh_desc,
                                         const std::function<Mesh(int)>& make_mesh,
                                         const std::vector<int>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("convergence_study: no sizes");
    for (size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("convergence_study: sizes must ascend");

    std::vector<RunRecord> records(sizes.size());
    std::exception_ptr failure;
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= sizes.size() || failed.load()) return;
            try {
                const Mesh mesh = make_mesh(sizes[k]);
                records[k] = run_method(mesh, opt, mesh_desc, sizes[k]).record;
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };

    const int cap = std::min<int>(study_thread_cap(), static_cast<int>(sizes.size()));
    if (cap <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < cap; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) std::rethrow_exception(failure);
    return records;
}

const char* const kCsvHeader =
    "method,problem,mesh,n,min_conc,violated,total,iters_empty,iters_warm,"
    "mass_res_max,mass_res_total,flux_exterior,flux_interior,time_assembly_s,"
    "time_qp_s";

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kCsvHeader << "\n";
    for (const auto& r : records) {
        out << r.method << ',' << r.problem << ',' << r.mesh << ',' << r.n << ','
            << fmt17(r.min_conc) << ',' << r.violated << ',' << r.total << ','
            << r.iters_empty << ',' << r.iters_warm << ',' << fmt17(r.mass_res_max)
            << ',' << fmt17(r.mass_res_total) << ',' << fmt17(r.flux_exterior) << ','
            << fmt17(r.flux_interior) << ',' << fmt17(r.time_assembly_s) << ','
            << fmt17(r.time_qp_s) << "\n";
    }
}

}  // namespace tdnn
