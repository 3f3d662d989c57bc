#include "obstacle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace hvar {

namespace {

void validate_data(const ObstacleProblem& p) {
    const Eigen::Index n = p.node_count();
    if (p.n_interior < 1 || p.n_interior > n)
        throw UsageError("obstacle problem: invalid interior count");
    if (p.phi.size() != n || p.u0.size() != n)
        throw UsageError("obstacle problem: phi/u0 must cover all nodes");
    if (p.load_weak.size() != p.n_interior)
        throw UsageError("obstacle problem: load must cover interior nodes");
    if (!p.phi.allFinite() || !p.u0.allFinite() || !p.load_weak.allFinite())
        throw UsageError("obstacle problem: data must be finite");
    if (((p.u0 - p.phi).array() > 0.0).any())
        throw UsageError("obstacle problem: exterior datum must satisfy u0 <= phi everywhere");
}

}  // namespace

ObstacleProblem ObstacleProblem::from_form(const StiffnessForm& form,
                                           const Eigen::VectorXd& f_density,
                                           Eigen::VectorXd phi, Eigen::VectorXd u0) {
    if (!form.grid) throw UsageError("obstacle problem: form has no grid");
    const Grid& g = *form.grid;
    if (f_density.size() != g.interior_count())
        throw UsageError("obstacle problem: f must be given on interior nodes");
    ObstacleProblem p;
    p.matrix = form.matrix;
    p.n_interior = g.interior_count();
    p.load_density = f_density;
    p.load_weak = f_density.cwiseProduct(g.volumes().head(g.interior_count()));
    p.phi = std::move(phi);
    p.u0 = std::move(u0);
    p.grid = form.grid;
    validate_data(p);
    return p;
}

ObstacleProblem ObstacleProblem::from_matrix(const Eigen::MatrixXd& a,
                                             Eigen::VectorXd load_weak, Eigen::VectorXd phi,
                                             Eigen::VectorXd u0, Eigen::Index n_interior) {
    if (a.rows() != a.cols()) throw UsageError("obstacle problem: matrix must be square");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw UsageError("obstacle problem: matrix must be symmetric");
    ObstacleProblem p;
    p.matrix = a.sparseView();
    p.matrix.makeCompressed();
    p.n_interior = n_interior;
    p.load_weak = std::move(load_weak);
    p.load_density = p.load_weak;
    p.phi = std::move(phi);
    p.u0 = std::move(u0);
    validate_data(p);
    return p;
}

Eigen::VectorXd ObstacleProblem::full_field(const Eigen::VectorXd& interior) const {
    if (interior.size() != n_interior)
        throw UsageError("obstacle problem: interior field length mismatch");
    Eigen::VectorXd full(node_count());
    full.head(n_interior) = interior;
    full.tail(node_count() - n_interior) = u0.tail(node_count() - n_interior);
    return full;
}

Eigen::VectorXd ObstacleProblem::apply_interior(const Eigen::VectorXd& interior) const {
    return (matrix * full_field(interior)).head(n_interior);
}

double cutoff_ramp(double r, double l) {
    if (!(r > 0.0 && r < 1.0)) throw UsageError("cutoff: r must lie in (0,1)");
    if (l <= 0.0) return 0.0;
    if (l >= r) return 1.0;
    return l / r;
}

double penalized_rhs(const PenalizationState& state, const ObstacleProblem& problem,
                     Eigen::Index i, double l) {
    if (i < 0 || i >= problem.n_interior)
        throw UsageError("penalized_rhs: interior node index required");
    return state.reaction_bound(i) * (1.0 - cutoff_ramp(state.r, problem.phi(i) - l)) -
           problem.load_weak(i);
}

namespace {

Eigen::VectorXd reaction_bound_weak(const ObstacleProblem& p) {
    const Eigen::VectorXd a_phi = (p.matrix * p.phi).head(p.n_interior);
    return (p.load_weak - a_phi).cwiseMax(0.0);
}

// Diagonally preconditioned conjugate gradient for the SPD Newton systems.
Eigen::VectorXd cg_solve(const Eigen::SparseMatrix<double>& a_ii,
                         const Eigen::VectorXd& shift, const Eigen::VectorXd& rhs,
                         double rel_tol) {
    const Eigen::Index n = rhs.size();
    Eigen::VectorXd diag = a_ii.diagonal() + shift;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z = r.cwiseQuotient(diag);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double target = rel_tol * rhs.norm();
    for (Eigen::Index it = 0; it < 4 * n + 50; ++it) {
        if (r.norm() <= target) break;
        Eigen::VectorXd ap = a_ii * p + shift.cwiseProduct(p);
        const double alpha = rz / p.dot(ap);
        x += alpha * p;
        r -= alpha * ap;
        z = r.cwiseQuotient(diag);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    return x;
}

}  // namespace

PenalizationState solve_penalized(const ObstacleProblem& problem, double r, double tol,
                                  const Eigen::VectorXd* warm_start_interior) {
    if (!(r > 0.0 && r < 1.0)) throw UsageError("solve_penalized: r must lie in (0,1)");
    if (!(tol > 0.0)) throw UsageError("solve_penalized: tol must be positive");

    const Eigen::Index ni = problem.n_interior;
    const Eigen::SparseMatrix<double> a_ii =
        problem.matrix.topLeftCorner(ni, ni);

    PenalizationState state;
    state.r = r;
    state.reaction_bound = reaction_bound_weak(problem);

    Eigen::VectorXd z = warm_start_interior ? *warm_start_interior
                                            : Eigen::VectorXd(problem.phi.head(ni));
    auto residual = [&](const Eigen::VectorXd& zi) -> Eigen::VectorXd {
        Eigen::VectorXd res = problem.apply_interior(zi) - problem.load_weak;
        for (Eigen::Index i = 0; i < ni; ++i)
            res(i) += state.reaction_bound(i) *
                      (1.0 - cutoff_ramp(r, problem.phi(i) - zi(i)));
        return res;
    };

    Eigen::VectorXd res = residual(z);
    const int max_newton = 100;
    int it = 0;
    int stalls = 0;
    for (; it < max_newton && res.cwiseAbs().maxCoeff() > tol; ++it) {
        // d/du [T (1 - D_r(phi - u))] = T/r on the ramp, else 0: SPD shift.
        Eigen::VectorXd shift = Eigen::VectorXd::Zero(ni);
        for (Eigen::Index i = 0; i < ni; ++i) {
            const double gap = problem.phi(i) - z(i);
            if (gap > 0.0 && gap < r) shift(i) = state.reaction_bound(i) / r;
        }
        const Eigen::VectorXd step = cg_solve(a_ii, shift, -res, 1e-12);
        double eta = 1.0;
        const double base = res.norm();
        bool improved = false;
        for (int back = 0; back < 30; ++back) {
            Eigen::VectorXd cand = z + eta * step;
            Eigen::VectorXd cand_res = residual(cand);
            if (cand_res.norm() < base * (1.0 - 1e-9)) {
                z = std::move(cand);
                res = std::move(cand_res);
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        // Three consecutive failed line searches: the round-off floor is reached.
        if (!improved && ++stalls >= 3) break;
        if (improved) stalls = 0;
    }
    if (res.cwiseAbs().maxCoeff() > tol) {
        std::ostringstream msg;
        msg << "solve_penalized: no convergence after " << it
            << " Newton steps; residual " << res.cwiseAbs().maxCoeff();
        throw SolverError(msg.str());
    }

    state.u = problem.full_field(z);
    state.newton_iterations = it;
    state.violation_sup =
        ((z - problem.phi.head(ni)).cwiseMax(0.0)).maxCoeff();
    return state;
}

std::vector<PenalizationState> run_penalization_path(const ObstacleProblem& problem,
                                                     const std::vector<double>& schedule,
                                                     double tol) {
    std::vector<PenalizationState> path;
    path.reserve(schedule.size());
    const Eigen::VectorXd* warm = nullptr;
    Eigen::VectorXd last;
    for (double r : schedule) {
        path.push_back(solve_penalized(problem, r, tol, warm));
        last = path.back().u.head(problem.n_interior);
        warm = &last;
    }
    return path;
}

VISolution solve_vi_psor(const ObstacleProblem& problem, double omega, double tol,
                         int max_iter) {
    if (!(omega > 0.0 && omega < 2.0))
        throw UsageError("solve_vi_psor: omega must lie in (0,2)");
    if (!(tol > 0.0)) throw UsageError("solve_vi_psor: tol must be positive");
    const Eigen::Index ni = problem.n_interior;
    const Eigen::Index n = problem.node_count();

    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = problem.matrix;
    for (Eigen::Index i = 0; i < ni; ++i) {
        if (!(rows.coeff(i, i) > 0.0))
            throw UsageError("solve_vi_psor: interior diagonal must be positive");
    }

    Eigen::VectorXd u(n);
    u.head(ni) = problem.phi.head(ni);
    u.tail(n - ni) = problem.u0.tail(n - ni);

    auto row_dot = [&](Eigen::Index i, const Eigen::VectorXd& v, double& diag) {
        double acc = 0.0;
        diag = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, i); it;
             ++it) {
            if (it.col() == i)
                diag = it.value();
            else
                acc += it.value() * v(it.col());
        }
        return acc;
    };

    int sweep = 0;
    double pg = 0.0;
    for (; sweep < max_iter; ++sweep) {
        for (Eigen::Index i = 0; i < ni; ++i) {
            double diag = 0.0;
            const double off = row_dot(i, u, diag);
            const double target = (problem.load_weak(i) - off) / diag;
            u(i) = std::min(problem.phi(i), u(i) + omega * (target - u(i)));
        }
        pg = 0.0;
        const Eigen::VectorXd grad = (problem.matrix * u).head(ni) - problem.load_weak;
        for (Eigen::Index i = 0; i < ni; ++i) {
            const double g = (u(i) >= problem.phi(i)) ? std::max(0.0, grad(i))
                                                      : std::abs(grad(i));
            pg = std::max(pg, g);
        }
        if (pg <= tol) break;
    }
    if (pg > tol) {
        std::ostringstream msg;
        msg << "solve_vi_psor: projected gradient " << pg << " above tol after " << sweep
            << " sweeps";
        throw SolverError(msg.str());
    }

    VISolution sol;
    sol.u = u;
    sol.pg_norm = pg;
    sol.iterations = sweep + 1;
    for (Eigen::Index i = 0; i < ni; ++i)
        if (u(i) >= problem.phi(i)) sol.active_set.push_back(i);
    return sol;
}

VISolution solve_vi_bruteforce(const ObstacleProblem& problem) {
    const Eigen::Index ni = problem.n_interior;
    if (ni > 15) throw UsageError("solve_vi_bruteforce: interior count capped at 15");
    const Eigen::Index n = problem.node_count();
    const Eigen::MatrixXd a = Eigen::MatrixXd(problem.matrix);

    const double feas_tol = 1e-11;
    bool found = false;
    double best_obj = 0.0;
    Eigen::VectorXd best;
    std::vector<Eigen::Index> best_active;

    Eigen::VectorXd ext = problem.u0.tail(n - ni);
    for (long mask = 0; mask < (1L << ni); ++mask) {
        std::vector<Eigen::Index> act, fre;
        for (Eigen::Index i = 0; i < ni; ++i)
            ((mask >> i) & 1) ? act.push_back(i) : fre.push_back(i);

        Eigen::VectorXd ui(ni);
        for (auto i : act) ui(i) = problem.phi(i);
        if (!fre.empty()) {
            const Eigen::Index nf = static_cast<Eigen::Index>(fre.size());
            Eigen::MatrixXd aff(nf, nf);
            Eigen::VectorXd rhs(nf);
            for (Eigen::Index p = 0; p < nf; ++p) {
                rhs(p) = problem.load_weak(fre[p]);
                for (Eigen::Index qcol = 0; qcol < nf; ++qcol)
                    aff(p, qcol) = a(fre[p], fre[qcol]);
                for (auto i : act) rhs(p) -= a(fre[p], i) * problem.phi(i);
                for (Eigen::Index e = 0; e < n - ni; ++e)
                    rhs(p) -= a(fre[p], ni + e) * ext(e);
            }
            const Eigen::VectorXd uf = aff.ldlt().solve(rhs);
            for (Eigen::Index p = 0; p < nf; ++p) ui(fre[p]) = uf(p);
        }

        bool ok = true;
        for (auto i : fre)
            if (ui(i) > problem.phi(i) + feas_tol) { ok = false; break; }
        if (!ok) continue;
        const Eigen::VectorXd grad = problem.apply_interior(ui) - problem.load_weak;
        for (auto i : act)
            if (-grad(i) < -feas_tol) { ok = false; break; }  // multiplier F - Au >= 0
        if (!ok) continue;

        const double obj = 0.5 * ui.dot(a.topLeftCorner(ni, ni) * ui) +
                           ui.dot(a.topRightCorner(ni, n - ni) * ext) -
                           problem.load_weak.dot(ui);
        if (!found || obj < best_obj) {
            found = true;
            best_obj = obj;
            best = ui;
            best_active = act;
        }
    }
    if (!found) throw SolverError("solve_vi_bruteforce: no KKT point found");

    VISolution sol;
    sol.u = problem.full_field(best);
    sol.pg_norm = 0.0;
    sol.active_set = std::move(best_active);
    sol.iterations = 1 << ni;
    return sol;
}

LSReport verify_lewy_stampacchia(const ObstacleProblem& problem, const Eigen::VectorXd& u,
                                 double tol) {
    if (u.size() != problem.node_count())
        throw UsageError("verify_lewy_stampacchia: field length mismatch");
    const Eigen::Index ni = problem.n_interior;
    LSReport rep;
    rep.tol = tol;
    rep.lower = problem.load_weak - (problem.matrix * u).head(ni);
    rep.upper = (problem.load_weak - (problem.matrix * problem.phi).head(ni)).cwiseMax(0.0);
    rep.worst_lower = rep.lower.minCoeff();
    rep.worst_upper = (rep.upper - rep.lower).minCoeff();
    rep.pass = rep.worst_lower >= -tol && rep.worst_upper >= -tol;
    return rep;
}

double comparison_check(const StiffnessForm& form, const Field& u, const Field& v) {
    if (!form.grid) throw UsageError("comparison_check: form has no grid");
    const Field w = u - v;
    const Field w_pos = w.cwiseMax(0.0);
    require_z0(*form.grid, w_pos, "comparison_check");
    return bilinear(form, w, w_pos);
}

}  // namespace hvar
