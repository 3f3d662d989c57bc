#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "group.hpp"

namespace hvar {

enum class NodeLabel : std::uint8_t { Interior, Exterior };
enum class Region { Interior, Exterior, OutsideTruncation };

/// Bounded domain Omega in H^N: an axis-aligned box in (x,y,t) coordinates
/// or a Koranyi ball (left-translated unit-ball dilate).
struct DomainSpec {
    enum class Shape { Box, KoranyiBall };

    Shape shape = Shape::Box;
    int n = 1;
    Eigen::VectorXd center;       // flat (x..,y..,t), length 2N+1
    Eigen::VectorXd half_widths;  // box only, length 2N+1, all > 0
    double radius = 0.0;          // ball only, > 0

    static DomainSpec box(int n, Eigen::VectorXd center, Eigen::VectorXd half_widths);
    static DomainSpec koranyi_ball(int n, Eigen::VectorXd center, double radius);

    /// Strict membership of a point given by flat coordinates.
    bool contains(const Eigen::VectorXd& coords) const;
    bool contains(const GroupElement& p) const;

    /// Exact Lebesgue measure of Omega.
    double measure() const;
    /// Largest Koranyi norm over Omega (exact for boxes via corners, |c|+r for balls).
    double max_knorm() const;
    /// Heuristic homogeneous-metric diameter (corner pairs for boxes, 2r for balls).
    double diameter_estimate() const;
};

/// Cell-centered tensor grid covering Omega and the truncated exterior collar
/// B_{R_trunc}(0) \ Omega. Node ids are interior-first; all cells share the
/// volume h^{2N} * h_t. Immutable after construction.
class Grid {
public:
    /// h_t <= 0 selects the isotropic default h_t = h.
    static Grid build(const DomainSpec& domain, double h, double r_trunc, double h_t = 0.0,
                      std::size_t node_cap = 200000);

    /// Explicit node set (testing and CSV re-import). Nodes must be interior-first.
    static Grid from_nodes(int n, Eigen::MatrixXd coords, Eigen::VectorXd volumes,
                           std::vector<NodeLabel> labels, double h, double r_trunc);

    int dim() const { return n_; }
    Eigen::Index node_count() const { return coords_.rows(); }
    Eigen::Index interior_count() const { return n_interior_; }
    Eigen::Index exterior_count() const { return node_count() - n_interior_; }
    double spacing() const { return h_; }
    double spacing_t() const { return h_t_; }
    double truncation_radius() const { return r_trunc_; }
    const DomainSpec& domain() const { return domain_; }
    bool has_domain() const { return has_domain_; }

    const Eigen::MatrixXd& coords() const { return coords_; }
    const Eigen::VectorXd& volumes() const { return volumes_; }
    double volume(Eigen::Index i) const { return volumes_(i); }
    NodeLabel label(Eigen::Index i) const { return labels_[static_cast<std::size_t>(i)]; }
    bool is_interior(Eigen::Index i) const { return i < n_interior_; }
    GroupElement node(Eigen::Index i) const;

    /// Koranyi norm (to the fourth power) of node_j^{-1} * node_i.
    double rel_knorm4(Eigen::Index i, Eigen::Index j) const;

    /// Classify an arbitrary point against Omega and the truncation ball.
    Region classify(const GroupElement& p) const;

    /// Sum of retained cell volumes (node_count * cell volume up to round-off).
    double total_volume() const { return volumes_.sum(); }
    double interior_volume() const { return volumes_.head(n_interior_).sum(); }

private:
    Grid() = default;

    int n_ = 1;
    Eigen::MatrixXd coords_;  // node_count x (2N+1)
    Eigen::VectorXd volumes_;
    std::vector<NodeLabel> labels_;
    Eigen::Index n_interior_ = 0;
    double h_ = 0.0, h_t_ = 0.0, r_trunc_ = 0.0;
    DomainSpec domain_;
    bool has_domain_ = false;
};

}  // namespace hvar
