#pragma once

#include <Eigen/Core>
#include <functional>

#include "errors.hpp"

namespace hvar {

/// A point (x, y, t) of the Heisenberg group H^N = R^N x R^N x R.
///
/// Immutable after construction; the group product is
///   (x,y,t)·(x',y',t') = (x+x', y+y', t+t' + 2(<x',y> - <x,y'>)).
class GroupElement {
public:
    GroupElement(Eigen::VectorXd x, Eigen::VectorXd y, double t);

    /// Identity element of H^N.
    static GroupElement zero(int n);

    int dim() const { return static_cast<int>(x_.size()); }
    const Eigen::VectorXd& x() const { return x_; }
    const Eigen::VectorXd& y() const { return y_; }
    double t() const { return t_; }

    /// Flat coordinates (x_1..x_N, y_1..y_N, t), length 2N+1.
    Eigen::VectorXd coords() const;
    static GroupElement from_coords(int n, const Eigen::VectorXd& c);

private:
    Eigen::VectorXd x_, y_;
    double t_;
};

GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);
GroupElement dilate(double theta, const GroupElement& a);

/// Koranyi (homogeneous) norm |xi| = (t^2 + (|x|^2 + |y|^2)^2)^{1/4}.
double knorm(const GroupElement& a);

/// Fourth power of the Koranyi norm; cheap building block for kernels.
double knorm4(const GroupElement& a);

/// theta(xi) = min{1, |xi|^2}, the weight against which kernels are integrable.
double theta_weight(const GroupElement& a);

/// Homogeneous dimension Q = 2N+2.
inline int homogeneous_dim(int n) { return 2 * n + 2; }

enum class FieldKind { X, Y, T };

/// Left-invariant frame as central finite-difference stencils:
///   X_j = d/dx_j + 2 y_j d/dt,  Y_j = d/dy_j - 2 x_j d/dt,  T = d/dt.
struct VectorFieldStencil {
    FieldKind kind = FieldKind::X;
    int index = 1;  // 1-based, in [1, N]; ignored for T
    double h = 1e-4;
};

using ScalarField = std::function<double(const GroupElement&)>;

/// O(h^2) approximation of (X_j f)(p), (Y_j f)(p) or (T f)(p).
double apply_vector_field(const VectorFieldStencil& stencil, const ScalarField& f,
                          const GroupElement& p);

}  // namespace hvar
