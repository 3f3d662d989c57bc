#pragma once

#include <optional>
#include <vector>

#include "assembly.hpp"

namespace hvar {

/// Discrete obstacle problem: minimize 1/2 u^T A u - F^T u over
/// { u <= phi on interior nodes, u = u0 on exterior nodes }.
/// F is the weak (volume-weighted) load; phi and u0 live on all nodes and
/// must satisfy u0 <= phi everywhere.
struct ObstacleProblem {
    Eigen::SparseMatrix<double> matrix;  // full node set
    Eigen::Index n_interior = 0;
    Eigen::VectorXd load_weak;     // size n_interior
    Eigen::VectorXd load_density;  // size n_interior (weak load / volume; = weak for matrix instances)
    Eigen::VectorXd phi;           // size node_count
    Eigen::VectorXd u0;            // size node_count
    std::shared_ptr<const Grid> grid;  // null for matrix-flavored instances

    static ObstacleProblem from_form(const StiffnessForm& form, const Eigen::VectorXd& f_density,
                                     Eigen::VectorXd phi, Eigen::VectorXd u0);
    static ObstacleProblem from_matrix(const Eigen::MatrixXd& a, Eigen::VectorXd load_weak,
                                       Eigen::VectorXd phi, Eigen::VectorXd u0,
                                       Eigen::Index n_interior);

    Eigen::Index node_count() const { return matrix.rows(); }
    /// Interior unknowns padded with the exterior datum.
    Eigen::VectorXd full_field(const Eigen::VectorXd& interior) const;
    /// Interior components of A * full_field(interior).
    Eigen::VectorXd apply_interior(const Eigen::VectorXd& interior) const;
};

struct VISolution {
    Eigen::VectorXd u;  // full field, exterior trace = u0 exactly
    double pg_norm = 0.0;
    std::vector<Eigen::Index> active_set;
    int iterations = 0;
};

/// Penalization cut-off: 0 for l <= 0, l/r on (0, r), 1 for l >= r. r in (0,1).
double cutoff_ramp(double r, double l);

struct PenalizationState {
    double r = 0.0;
    Eigen::VectorXd reaction_bound;  // T = (F - A phi)^+ on interior (weak)
    Eigen::VectorXd u;               // full field
    double violation_sup = 0.0;      // sup over interior of (u - phi)^+
    int newton_iterations = 0;
};

/// Penalized right-hand side w_r at interior node i and trial value l:
/// T_i (1 - D_r(phi_i - l)) - F_i; nondecreasing in l.
double penalized_rhs(const PenalizationState& state, const ObstacleProblem& problem,
                     Eigen::Index i, double l);

/// Solve the penalized semilinear system
///   (A u)_i + T_i (1 - D_r(phi_i - u_i)) - F_i = 0  on interior,  u = u0 outside,
/// by damped Newton; the piecewise-linear reaction keeps the Jacobian SPD.
PenalizationState solve_penalized(const ObstacleProblem& problem, double r, double tol,
                                  const Eigen::VectorXd* warm_start_interior = nullptr);

/// Warm-started run over a decreasing r-schedule.
std::vector<PenalizationState> run_penalization_path(const ObstacleProblem& problem,
                                                     const std::vector<double>& schedule,
                                                     double tol);

/// Projected SOR for the variational inequality; terminates once the projected
/// gradient is below tol in the max norm.
VISolution solve_vi_psor(const ObstacleProblem& problem, double omega, double tol,
                         int max_iter);

/// Exact reference solver: enumerate active sets, solve each equality-constrained
/// system, keep the feasible KKT point. Interior count capped at 15.
VISolution solve_vi_bruteforce(const ObstacleProblem& problem);

/// Componentwise Lewy-Stampacchia check for a VI solution candidate:
/// with L = F - A u and U = (F - A phi)^+ on interior nodes, pass iff
/// -tol <= L_i <= U_i + tol for every i. Report-only.
struct LSReport {
    bool pass = false;
    double worst_lower = 0.0;  // min_i L_i
    double worst_upper = 0.0;  // min_i (U_i - L_i)
    double tol = 0.0;
    Eigen::VectorXd lower;  // L
    Eigen::VectorXd upper;  // U
};

LSReport verify_lewy_stampacchia(const ObstacleProblem& problem, const Eigen::VectorXd& u,
                                 double tol);

/// a(u - v, (u - v)^+); requires (u - v)^+ to vanish on exterior nodes.
/// Nonnegative by the positive-part expansion identity; a caller that also
/// knows a(u, (u-v)^+) <= a(v, (u-v)^+) may conclude u <= v.
double comparison_check(const StiffnessForm& form, const Field& u, const Field& v);

}  // namespace hvar
