#include "group.hpp"

#include <cmath>

namespace hvar {

GroupElement::GroupElement(Eigen::VectorXd x, Eigen::VectorXd y, double t)
    : x_(std::move(x)), y_(std::move(y)), t_(t) {
    if (x_.size() != y_.size() || x_.size() < 1)
        throw UsageError("GroupElement: x and y must have the same positive length");
    if (!x_.allFinite() || !y_.allFinite() || !std::isfinite(t_))
        throw UsageError("GroupElement: all components must be finite");
}

GroupElement GroupElement::zero(int n) {
    return GroupElement(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0.0);
}

Eigen::VectorXd GroupElement::coords() const {
    const int n = dim();
    Eigen::VectorXd c(2 * n + 1);
    c.head(n) = x_;
    c.segment(n, n) = y_;
    c(2 * n) = t_;
    return c;
}

GroupElement GroupElement::from_coords(int n, const Eigen::VectorXd& c) {
    if (c.size() != 2 * n + 1)
        throw UsageError("GroupElement::from_coords: expected 2N+1 coordinates");
    return GroupElement(c.head(n), c.segment(n, n), c(2 * n));
}

GroupElement multiply(const GroupElement& a, const GroupElement& b) {
    if (a.dim() != b.dim())
        throw UsageError("multiply: dimension mismatch between group elements");
    const double twist = 2.0 * (b.x().dot(a.y()) - a.x().dot(b.y()));
    return GroupElement(a.x() + b.x(), a.y() + b.y(), a.t() + b.t() + twist);
}

GroupElement inverse(const GroupElement& a) {
    return GroupElement(-a.x(), -a.y(), -a.t());
}

GroupElement dilate(double theta, const GroupElement& a) {
    if (!(theta > 0.0))
        throw UsageError("dilate: scale must be positive");
    return GroupElement(theta * a.x(), theta * a.y(), theta * theta * a.t());
}

double knorm4(const GroupElement& a) {
    const double r2 = a.x().squaredNorm() + a.y().squaredNorm();
    return a.t() * a.t() + r2 * r2;
}

double knorm(const GroupElement& a) {
    // sqrt(sqrt(.)) is exact on perfect fourth powers, unlike pow(., 0.25).
    return std::sqrt(std::sqrt(knorm4(a)));
}

double theta_weight(const GroupElement& a) {
    return std::min(1.0, std::sqrt(knorm4(a)));
}

namespace {

GroupElement shift_coord(const GroupElement& p, FieldKind kind, int j, double delta) {
    Eigen::VectorXd x = p.x(), y = p.y();
    double t = p.t();
    switch (kind) {
        case FieldKind::X: x(j - 1) += delta; break;
        case FieldKind::Y: y(j - 1) += delta; break;
        case FieldKind::T: t += delta; break;
    }
    return GroupElement(std::move(x), std::move(y), t);
}

double central_diff(const ScalarField& f, const GroupElement& p, FieldKind kind, int j,
                    double h) {
    return (f(shift_coord(p, kind, j, h)) - f(shift_coord(p, kind, j, -h))) / (2.0 * h);
}

}  // namespace

double apply_vector_field(const VectorFieldStencil& stencil, const ScalarField& f,
                          const GroupElement& p) {
    if (!(stencil.h > 0.0))
        throw UsageError("apply_vector_field: step h must be positive");
    const int j = stencil.index;
    if (stencil.kind != FieldKind::T && (j < 1 || j > p.dim()))
        throw UsageError("apply_vector_field: field index out of range");
    switch (stencil.kind) {
        case FieldKind::X:
            return central_diff(f, p, FieldKind::X, j, stencil.h) +
                   2.0 * p.y()(j - 1) * central_diff(f, p, FieldKind::T, 0, stencil.h);
        case FieldKind::Y:
            return central_diff(f, p, FieldKind::Y, j, stencil.h) -
                   2.0 * p.x()(j - 1) * central_diff(f, p, FieldKind::T, 0, stencil.h);
        case FieldKind::T:
            return central_diff(f, p, FieldKind::T, 0, stencil.h);
    }
    throw UsageError("apply_vector_field: unknown field kind");
}

}  // namespace hvar
