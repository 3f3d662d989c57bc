#pragma once

#include <cstdint>
#include <vector>

#include "assembly.hpp"

namespace hvar {

/// Superquadratic power nonlinearity f(xi, l) = c(xi) |l|^{q-2} l with primitive
/// F(xi, l) = c(xi) |l|^q / q. Satisfies the superlinear growth and
/// Ambrosetti-Rabinowitz conditions exactly with theta = q (any threshold).
struct Nonlinearity {
    double q = 4.0;
    Eigen::VectorXd coeff;  // c > 0 per interior node
    double theta = 4.0;     // = q for pure powers
    double r_threshold = 0.0;

    static Nonlinearity power(double q, Eigen::VectorXd coeff);
    static Nonlinearity power_const(double q, double c, Eigen::Index n_interior);

    double f(Eigen::Index i, double l) const;
    double primitive(Eigen::Index i, double l) const;  // F
    double df_dl(Eigen::Index i, double l) const;
    double coeff_max() const { return coeff.maxCoeff(); }
};

/// Discrete semilinear problem L_K u = f(xi, u) with zero exterior trace.
/// Unknowns are the interior nodal values; the quadratic part is the interior
/// block of the stiffness form.
struct SemilinearProblem {
    Eigen::SparseMatrix<double> a_ii;
    Eigen::VectorXd vol;  // interior volumes
    Nonlinearity nl;
    std::shared_ptr<const Grid> grid;  // null for matrix-flavored instances

    /// Grid-built problems validate q strictly inside (2, Q*), Q* = 2Q/(Q-2s).
    static SemilinearProblem from_form(const StiffnessForm& form, Nonlinearity nl, double s);
    static SemilinearProblem from_matrix(const Eigen::MatrixXd& a_ii, Eigen::VectorXd vol,
                                         Nonlinearity nl);

    Eigen::Index size() const { return a_ii.rows(); }
};

/// H(u) = 1/2 u^T A u - sum_i F(xi_i, u_i) vol_i  (interior coefficient vector).
double energy(const SemilinearProblem& problem, const Eigen::VectorXd& u);

/// Gradient of the energy: (A u)_i - f(xi_i, u_i) vol_i.
Eigen::VectorXd gradient(const SemilinearProblem& problem, const Eigen::VectorXd& u);

/// Growth / AR condition checks at sampled (node, value) pairs.
struct GrowthReport {
    bool growth_ok = false;       // |f| <= 2 eps |l| + q delta |l|^{q-1}
    bool small_l_ok = false;      // f(l)/|l| -> 0: ratio at |l| = 1e-6
    double small_l_ratio = 0.0;
    bool ar_ok = false;           // 0 < theta F <= l f beyond the threshold
    double ar_worst_gap = 0.0;    // min over samples of (l f - theta F)
    bool lower_bound_ok = false;  // F >= (c/q) |l|^q
    double eps_used = 0.0, delta_used = 0.0;
};

GrowthReport check_growth(const Nonlinearity& nl,
                          const std::vector<std::pair<Eigen::Index, double>>& samples);

/// Mountain-pass geometry certificate. Radii are measured in the
/// volume-weighted L2 norm; alpha = beta rho^2 - kappa rho^q is a valid lower
/// bound for the energy on that sphere, with
///   kappa = (c_max / q) (min vol)^{1 - q/2}   (exact discrete L^q <= L^2 bound)
///   beta  = 1/2 lambda_min(D^{-1/2} A D^{-1/2}), D = diag(vol)
///   rho   = (1 / (q kappa))^{1/(q-2)}.
struct MPGeometry {
    double alpha = 0.0;
    double rho = 0.0;
    double kappa = 0.0;
    double beta = 0.0;
    Eigen::VectorXd e;  // ray point with negative energy
    int doublings = 0;
};

MPGeometry mp_geometry(const SemilinearProblem& problem, int probe_count,
                       std::uint64_t seed = 7);

/// Volume-weighted L2 norm of an interior coefficient vector.
double vol_l2_norm(const SemilinearProblem& problem, const Eigen::VectorXd& u);

/// Closed-form Nehari scaling t*(u) = (u^T A u / sum c |u|^q vol)^{1/(q-2)}.
double nehari_scale(const SemilinearProblem& problem, const Eigen::VectorXd& u);

struct MPReport {
    MPGeometry geometry;
    Eigen::VectorXd u_star;
    double energy_star = 0.0;
    double grad_inf = 0.0;
    int iterations = 0;
    std::vector<Eigen::VectorXd> iterates;  // for PS diagnostics
};

/// Nehari-ray minimization (project to the Nehari manifold along rays, descend
/// over directions), then Newton polish on A u = f(u) vol.
MPReport solve_mountain_pass(const SemilinearProblem& problem, double tol,
                             int max_iter = 2000);

/// Palais-Smale style diagnostics along iterates.
struct PSReport {
    double sup_z0_norm = 0.0;
    bool ar_bound_ok = false;   // (1/2 - 1/theta) ||u||^2 <= H(u) - (1/theta)<H'(u),u>
    double ar_worst_gap = 0.0;
    bool grad_trend_down = false;
    std::vector<double> grad_norms;
};

PSReport ps_diagnostics(const SemilinearProblem& problem,
                        const std::vector<Eigen::VectorXd>& iterates);

}  // namespace hvar
