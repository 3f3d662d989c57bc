#pragma once

// Shared helpers for the unit and acceptance suites: tiny manual grids,
// seeded random fields, and independent brute-force oracles.

#include <memory>
#include <random>
#include <vector>

#include "core/assembly.hpp"

namespace hvar_test {

using namespace hvar;

/// Constant-one kernel (declared lower bound kept tiny; only eval matters here).
inline KernelSpec unit_kernel(int n = 1, double s = 0.5) {
    return KernelSpec::custom_radial([](double) { return 1.0; }, s, n, 1e-300);
}

/// Manual grid from flat coordinate rows; volumes default to one.
inline std::shared_ptr<const Grid> manual_grid(int n,
                                               const std::vector<std::vector<double>>& pts,
                                               Eigen::Index n_interior,
                                               double r_trunc = 100.0) {
    const Eigen::Index count = static_cast<Eigen::Index>(pts.size());
    const Eigen::Index m = 2 * n + 1;
    Eigen::MatrixXd coords(count, m);
    for (Eigen::Index i = 0; i < count; ++i)
        for (Eigen::Index k = 0; k < m; ++k) coords(i, k) = pts[i][k];
    std::vector<NodeLabel> labels;
    for (Eigen::Index i = 0; i < count; ++i)
        labels.push_back(i < n_interior ? NodeLabel::Interior : NodeLabel::Exterior);
    return std::make_shared<Grid>(Grid::from_nodes(
        n, std::move(coords), Eigen::VectorXd::Ones(count), std::move(labels), 1.0, r_trunc));
}

/// Two interior unit-volume nodes one Koranyi unit apart.
inline std::shared_ptr<const Grid> two_interior_nodes() {
    return manual_grid(1, {{0, 0, 0}, {1, 0, 0}}, 2);
}

/// One interior node plus one exterior node one unit apart.
inline std::shared_ptr<const Grid> interior_exterior_pair() {
    return manual_grid(1, {{0, 0, 0}, {1, 0, 0}}, 1);
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double span = 1.0) {
    std::uniform_real_distribution<double> unif(-span, span);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = unif(rng);
    return v;
}

/// Random field vanishing on exterior nodes.
inline Eigen::VectorXd random_z0_field(const Grid& grid, std::mt19937_64& rng,
                                       double span = 1.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.node_count());
    v.head(grid.interior_count()) = random_vector(grid.interior_count(), rng, span);
    return v;
}

/// Ordered-pair double-sum oracle for the bilinear form: no matrix, no
/// factor-of-two bookkeeping shared with the implementation.
inline double bilinear_oracle(const Grid& grid, const KernelSpec& kernel,
                              const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              double delta_sing) {
    const Eigen::Index n = grid.node_count();
    const double cut4 = std::pow(delta_sing, 4);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!grid.is_interior(i) && !grid.is_interior(j)) continue;
            const double n4 = grid.rel_knorm4(i, j);
            if (n4 < cut4) continue;
            acc += (u(i) - u(j)) * (v(i) - v(j)) * kernel.eval_knorm4(n4) * grid.volume(i) *
                   grid.volume(j);
        }
    return acc;
}

}  // namespace hvar_test
