#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "group.hpp"

namespace hvar {

enum class KernelKind { Fractional, Custom };

/// Admissible nonlocal kernel K on H^N \ {0}:
///   K > 0,  K(xi) = K(xi^{-1}),  theta*K integrable,
///   K(xi) >= mu * |xi|^{-(Q+2s)}.
///
/// Only radial profiles (functions of the Koranyi norm) are representable;
/// symmetry is then automatic. The fractional kernel is
/// K(xi) = scale * |xi|^{-(Q+2s)}.
class KernelSpec {
public:
    static KernelSpec fractional(double s, int n, double scale = 1.0);

    /// Radial custom kernel: profile maps Koranyi radius > 0 to a positive value.
    /// mu is the declared lower-bound constant against |.|^{-(Q+2s)}.
    static KernelSpec custom_radial(std::function<double(double)> profile, double s, int n,
                                    double mu, double scale = 1.0);

    KernelKind kind() const { return kind_; }
    double s() const { return s_; }
    double mu() const { return mu_; }
    double scale() const { return scale_; }
    int n() const { return n_; }
    int q_dim() const { return homogeneous_dim(n_); }
    /// Decay exponent Q + 2s of the reference fractional kernel.
    double exponent() const { return q_dim() + 2.0 * s_; }

    double eval(const GroupElement& xi) const;
    /// Value at Koranyi radius r > 0 (radial form used by assembly).
    double eval_radius(double r) const;
    /// Value from the fourth power of the Koranyi norm; hot path for assembly.
    double eval_knorm4(double n4) const;

private:
    KernelSpec() = default;

    KernelKind kind_ = KernelKind::Fractional;
    double s_ = 0.5;
    double mu_ = 1.0;
    double scale_ = 1.0;
    int n_ = 1;
    std::function<double(double)> profile_;  // empty for the fractional kernel
};

/// Result of the numerical admissibility checks. Finiteness of the theta-weighted
/// integral is certified analytically only for the fractional kernel; for custom
/// profiles the quadrature value plus extrapolated tail is reported without any
/// claim of proof.
struct AdmissibilityReport {
    double max_symmetry_violation = 0.0;
    double empirical_mu = 0.0;     // min over samples of K(xi) * |xi|^{Q+2s}
    bool lower_bound_ok = false;   // empirical_mu >= declared mu (small slack)
    double theta_integral = 0.0;   // annular quadrature of theta*K over knorm in [2^-20, R_int]
    double theta_tail = 0.0;       // extrapolated tail beyond R_int (inf if divergent)
    bool tail_convergent = false;
    bool finiteness_certified = false;  // analytic certificate (fractional only)
    int sample_count = 0;
};

AdmissibilityReport check_admissible(const KernelSpec& kernel, int sample_count, double r_int,
                                     std::uint64_t seed = 2024);

/// Lebesgue measure of the unit Koranyi ball in H^N (closed form).
double koranyi_unit_ball_volume(int n);

}  // namespace hvar
