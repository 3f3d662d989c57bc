#include "grid.hpp"

#include <cmath>

#include "kernel.hpp"

namespace hvar {

DomainSpec DomainSpec::box(int n, Eigen::VectorXd center, Eigen::VectorXd half_widths) {
    if (n < 1) throw UsageError("domain: N must be >= 1");
    if (center.size() != 2 * n + 1 || half_widths.size() != 2 * n + 1)
        throw UsageError("domain: center/half_widths must have length 2N+1");
    if (!(half_widths.minCoeff() > 0.0))
        throw UsageError("domain: box half-widths must be positive");
    DomainSpec d;
    d.shape = Shape::Box;
    d.n = n;
    d.center = std::move(center);
    d.half_widths = std::move(half_widths);
    return d;
}

DomainSpec DomainSpec::koranyi_ball(int n, Eigen::VectorXd center, double radius) {
    if (n < 1) throw UsageError("domain: N must be >= 1");
    if (center.size() != 2 * n + 1)
        throw UsageError("domain: center must have length 2N+1");
    if (!(radius > 0.0)) throw UsageError("domain: ball radius must be positive");
    DomainSpec d;
    d.shape = Shape::KoranyiBall;
    d.n = n;
    d.center = std::move(center);
    d.radius = radius;
    return d;
}

bool DomainSpec::contains(const Eigen::VectorXd& coords) const {
    if (coords.size() != 2 * n + 1)
        throw UsageError("domain contains: coordinate length mismatch");
    if (shape == Shape::Box)
        return ((coords - center).cwiseAbs().array() < half_widths.array()).all();
    const GroupElement c = GroupElement::from_coords(n, center);
    const GroupElement p = GroupElement::from_coords(n, coords);
    return knorm(multiply(inverse(c), p)) < radius;
}

bool DomainSpec::contains(const GroupElement& p) const { return contains(p.coords()); }

double DomainSpec::measure() const {
    if (shape == Shape::Box) return (2.0 * half_widths).prod();
    return koranyi_unit_ball_volume(n) * std::pow(radius, homogeneous_dim(n));
}

double DomainSpec::max_knorm() const {
    if (shape == Shape::KoranyiBall) {
        // Koranyi gauge obeys the exact triangle inequality, so sup |c.z| <= |c| + r.
        return knorm(GroupElement::from_coords(n, center)) + radius;
    }
    // knorm^4 = t^2 + (|x|^2+|y|^2)^2 is monotone in each |coordinate|, so the
    // maximum over the box sits at the farthest corner.
    Eigen::VectorXd far(2 * n + 1);
    for (Eigen::Index k = 0; k < far.size(); ++k)
        far(k) = std::abs(center(k)) + half_widths(k);
    return knorm(GroupElement::from_coords(n, far));
}

double DomainSpec::diameter_estimate() const {
    if (shape == Shape::KoranyiBall) return 2.0 * radius;
    const Eigen::Index m = 2 * n + 1;
    const long corners = 1L << m;
    double best = 0.0;
    for (long a = 0; a < corners; ++a)
        for (long b = a + 1; b < corners; ++b) {
            Eigen::VectorXd ca(m), cb(m);
            for (Eigen::Index k = 0; k < m; ++k) {
                ca(k) = center(k) + ((a >> k) & 1 ? half_widths(k) : -half_widths(k));
                cb(k) = center(k) + ((b >> k) & 1 ? half_widths(k) : -half_widths(k));
            }
            const GroupElement ga = GroupElement::from_coords(n, ca);
            const GroupElement gb = GroupElement::from_coords(n, cb);
            best = std::max(best, knorm(multiply(inverse(ga), gb)));
        }
    return best;
}

namespace {

struct Axis {
    long i_min, i_max;  // lattice index range, centers at anchor + (i + 1/2) * step
    double anchor, step;
    double center_of(long i) const { return anchor + (i + 0.5) * step; }
};

Axis make_axis(double anchor, double step, double bound) {
    // Cover [-bound, bound] with cell centers; one extra cell of slack per side.
    Axis ax;
    ax.anchor = anchor;
    ax.step = step;
    ax.i_min = static_cast<long>(std::floor((-bound - anchor) / step - 0.5)) - 1;
    ax.i_max = static_cast<long>(std::ceil((bound - anchor) / step - 0.5)) + 1;
    return ax;
}

}  // namespace

Grid Grid::build(const DomainSpec& domain, double h, double r_trunc, double h_t,
                 std::size_t node_cap) {
    if (!(h > 0.0)) throw UsageError("build_grid: h must be positive");
    if (h_t <= 0.0) h_t = h;
    if (!(r_trunc > 0.0)) throw UsageError("build_grid: R_trunc must be positive");
    if (domain.max_knorm() > 0.5 * r_trunc)
        throw UsageError("build_grid: Omega must be contained in B_{R_trunc/2}(0)");
    if (domain.shape == DomainSpec::Shape::Box) {
        for (Eigen::Index k = 0; k < domain.half_widths.size(); ++k) {
            const double step = (k == 2 * domain.n) ? h_t : h;
            const double cells = 2.0 * domain.half_widths(k) / step;
            if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
                throw UsageError("build_grid: h must divide the box extents");
        }
    }

    const int n = domain.n;
    const Eigen::Index m = 2 * n + 1;
    std::vector<Axis> axes;
    axes.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) {
        const bool is_t = (k == 2 * n);
        // Anchor cell edges on the box faces (odd cell counts per axis would
        // otherwise straddle them); ball domains anchor at the center.
        const double anchor = domain.shape == DomainSpec::Shape::Box
                                  ? domain.center(k) - domain.half_widths(k)
                                  : domain.center(k);
        axes.push_back(make_axis(anchor, is_t ? h_t : h, is_t ? r_trunc * r_trunc : r_trunc));
    }

    const double cell_volume = std::pow(h, 2 * n) * h_t;
    std::vector<double> interior_nodes, exterior_nodes;

    Eigen::VectorXd pt(m);
    std::vector<long> idx(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) idx[k] = axes[k].i_min;
    std::size_t retained = 0;
    for (;;) {
        for (Eigen::Index k = 0; k < m; ++k) pt(k) = axes[k].center_of(idx[k]);
        const GroupElement p = GroupElement::from_coords(n, pt);
        const bool inside = domain.contains(pt);
        if (inside || knorm(p) <= r_trunc) {
            auto& dst = inside ? interior_nodes : exterior_nodes;
            dst.insert(dst.end(), pt.data(), pt.data() + m);
            if (++retained > node_cap)
                throw ResourceError("build_grid: node count exceeds the configured cap");
        }
        // odometer increment, t fastest
        Eigen::Index k = m - 1;
        for (;;) {
            if (++idx[k] <= axes[k].i_max) break;
            idx[k] = axes[k].i_min;
            if (k == 0) goto done;
            --k;
        }
    }
done:
    const Eigen::Index n_int = static_cast<Eigen::Index>(interior_nodes.size()) / m;
    const Eigen::Index n_ext = static_cast<Eigen::Index>(exterior_nodes.size()) / m;
    Grid g;
    g.n_ = n;
    g.coords_.resize(n_int + n_ext, m);
    for (Eigen::Index i = 0; i < n_int; ++i)
        for (Eigen::Index k = 0; k < m; ++k) g.coords_(i, k) = interior_nodes[i * m + k];
    for (Eigen::Index i = 0; i < n_ext; ++i)
        for (Eigen::Index k = 0; k < m; ++k)
            g.coords_(n_int + i, k) = exterior_nodes[i * m + k];
    g.volumes_ = Eigen::VectorXd::Constant(n_int + n_ext, cell_volume);
    g.labels_.assign(static_cast<std::size_t>(n_int), NodeLabel::Interior);
    g.labels_.insert(g.labels_.end(), static_cast<std::size_t>(n_ext), NodeLabel::Exterior);
    g.n_interior_ = n_int;
    g.h_ = h;
    g.h_t_ = h_t;
    g.r_trunc_ = r_trunc;
    g.domain_ = domain;
    g.has_domain_ = true;
    return g;
}

Grid Grid::from_nodes(int n, Eigen::MatrixXd coords, Eigen::VectorXd volumes,
                      std::vector<NodeLabel> labels, double h, double r_trunc) {
    if (n < 1) throw UsageError("grid from_nodes: N must be >= 1");
    const Eigen::Index m = 2 * n + 1;
    const Eigen::Index count = coords.rows();
    if (coords.cols() != m) throw UsageError("grid from_nodes: coords must have 2N+1 columns");
    if (volumes.size() != count || static_cast<Eigen::Index>(labels.size()) != count)
        throw UsageError("grid from_nodes: volumes/labels size mismatch");
    if (count < 1) throw UsageError("grid from_nodes: empty node set");
    if (!(volumes.minCoeff() > 0.0))
        throw UsageError("grid from_nodes: volumes must be positive");
    Eigen::Index n_int = 0;
    while (n_int < count && labels[static_cast<std::size_t>(n_int)] == NodeLabel::Interior)
        ++n_int;
    for (Eigen::Index i = n_int; i < count; ++i)
        if (labels[static_cast<std::size_t>(i)] == NodeLabel::Interior)
            throw UsageError("grid from_nodes: nodes must be ordered interior-first");
    Grid g;
    g.n_ = n;
    g.coords_ = std::move(coords);
    g.volumes_ = std::move(volumes);
    g.labels_ = std::move(labels);
    g.n_interior_ = n_int;
    g.h_ = h;
    g.h_t_ = h;
    g.r_trunc_ = r_trunc;
    return g;
}

GroupElement Grid::node(Eigen::Index i) const {
    return GroupElement::from_coords(n_, coords_.row(i).transpose());
}

double Grid::rel_knorm4(Eigen::Index i, Eigen::Index j) const {
    const int n = n_;
    double r2 = 0.0, twist = 0.0;
    for (int k = 0; k < n; ++k) {
        const double dx = coords_(i, k) - coords_(j, k);
        const double dy = coords_(i, n + k) - coords_(j, n + k);
        r2 += dx * dx + dy * dy;
        twist += coords_(j, k) * coords_(i, n + k) - coords_(i, k) * coords_(j, n + k);
    }
    const double dt = coords_(i, 2 * n) - coords_(j, 2 * n) + 2.0 * twist;
    return dt * dt + r2 * r2;
}

Region Grid::classify(const GroupElement& p) const {
    if (has_domain_ && domain_.contains(p)) return Region::Interior;
    if (knorm(p) <= r_trunc_) return Region::Exterior;
    return Region::OutsideTruncation;
}

}  // namespace hvar
