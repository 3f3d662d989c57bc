#pragma once

#include <Eigen/SparseCore>
#include <memory>

#include "grid.hpp"
#include "kernel.hpp"

namespace hvar {

/// Nodal field over all retained grid nodes (interior-first indexing).
using Field = Eigen::VectorXd;

/// Discrete bilinear form of the nonlocal kernel over the pair region
/// S = all node pairs except exterior-exterior. Each unordered pair {i,j}
/// carries the weight 2 * K(node_j^{-1} node_i) * vol_i * vol_j, so that
/// v^T A u equals the ordered double sum over S. A is symmetric PSD with
/// nonpositive off-diagonal entries.
struct StiffnessForm {
    Eigen::SparseMatrix<double> matrix;  // node_count x node_count
    double delta_sing = 0.0;
    std::shared_ptr<const Grid> grid;

    Eigen::Index size() const { return matrix.rows(); }
};

/// Visit every retained pair (i interior or j interior, distance >= delta_sing).
/// fn(i, j, knorm4) is called once per unordered pair with i < j.
template <typename Fn>
void for_each_pair(const Grid& grid, double delta_sing, Fn&& fn) {
    const Eigen::Index n = grid.node_count();
    const Eigen::Index ni = grid.interior_count();
    const double cut4 = std::pow(std::max(delta_sing, 0.0), 4);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double n4 = grid.rel_knorm4(i, j);
            if (n4 == 0.0)
                throw SingularityError("pair sweep: coincident nodes at zero distance");
            if (n4 < cut4) continue;
            fn(i, j, n4);
        }
    }
}

StiffnessForm assemble_stiffness(std::shared_ptr<const Grid> grid, const KernelSpec& kernel,
                                 double delta_sing, int threads = 1);

/// Discrete nonlocal operator at interior nodes:
///   (L_h u)_i = sum_{j != i, dist >= delta} (u_j - u_i) K(node_j^{-1} node_i) vol_j.
/// Exterior components of the result are zero.
Field apply_operator(const Grid& grid, const KernelSpec& kernel, const Field& u,
                     double delta_sing);

/// a(u, v) = v^T A u.
double bilinear(const StiffnessForm& form, const Field& u, const Field& v);

/// sqrt(u^T A u) for fields vanishing on exterior nodes (usage error otherwise).
double z0_norm(const StiffnessForm& form, const Field& u);

/// Gagliardo-type seminorm with the pure fractional weight |.|^{-(Q+2s)} on the
/// same retained pair set; same exterior-trace precondition as z0_norm.
double gagliardo_seminorm(const Grid& grid, const Field& u, double s, double delta_sing);

/// Volume-weighted L^q norm over interior nodes, q >= 1.
double lq_norm(const Grid& grid, const Field& u, double q);

/// Absolute residual between a(u,v) and the second-difference pairing
///   sum_i u_i vol_i * sum_j 2 (v_i - v_j) K_ij vol_j
/// over identical retained pairs; v must vanish on exterior nodes. Both sides
/// are algebraic regroupings of the same pair sums, so the residual is
/// round-off only.
double duality_residual(const Grid& grid, const KernelSpec& kernel, const Field& u,
                        const Field& v, double delta_sing);

/// Throws UsageError unless u vanishes exactly on all exterior nodes.
void require_z0(const Grid& grid, const Field& u, const char* who);

}  // namespace hvar
