#include "kernel.hpp"

#include <cmath>
#include <random>

namespace hvar {

KernelSpec KernelSpec::fractional(double s, int n, double scale) {
    if (!(s > 0.0 && s < 1.0))
        throw UsageError("fractional kernel: s must lie in (0,1)");
    if (n < 1) throw UsageError("fractional kernel: N must be >= 1");
    if (!(scale > 0.0)) throw UsageError("fractional kernel: scale must be positive");
    KernelSpec k;
    k.kind_ = KernelKind::Fractional;
    k.s_ = s;
    k.n_ = n;
    k.scale_ = scale;
    k.mu_ = scale;  // K * |.|^{Q+2s} == scale identically
    return k;
}

KernelSpec KernelSpec::custom_radial(std::function<double(double)> profile, double s, int n,
                                     double mu, double scale) {
    if (!(s > 0.0 && s < 1.0))
        throw UsageError("custom kernel: s must lie in (0,1)");
    if (n < 1) throw UsageError("custom kernel: N must be >= 1");
    if (!(mu > 0.0)) throw UsageError("custom kernel: mu must be positive");
    if (!(scale > 0.0)) throw UsageError("custom kernel: scale must be positive");
    if (!profile) throw UsageError("custom kernel: missing radial profile");
    KernelSpec k;
    k.kind_ = KernelKind::Custom;
    k.s_ = s;
    k.n_ = n;
    k.mu_ = mu;
    k.scale_ = scale;
    k.profile_ = std::move(profile);
    return k;
}

double KernelSpec::eval_knorm4(double n4) const {
    if (!(n4 > 0.0))
        throw SingularityError("kernel eval: point coincides with the group identity");
    if (kind_ == KernelKind::Fractional)
        return scale_ * std::pow(n4, -0.25 * exponent());
    return scale_ * profile_(std::sqrt(std::sqrt(n4)));
}

double KernelSpec::eval_radius(double r) const {
    if (!(r > 0.0))
        throw SingularityError("kernel eval: radius must be positive");
    if (kind_ == KernelKind::Fractional) return scale_ * std::pow(r, -exponent());
    return scale_ * profile_(r);
}

double KernelSpec::eval(const GroupElement& xi) const {
    if (xi.dim() != n_) throw UsageError("kernel eval: dimension mismatch");
    return eval_knorm4(knorm4(xi));
}

double koranyi_unit_ball_volume(int n) {
    // |B_1| = (pi^N / Gamma(N)) * Gamma(N/2) Gamma(3/2) / Gamma((N+3)/2),
    // from slicing {(rho^2)^2 + t^2 < 1} over rho = |(x,y)|.
    const double logv = n * std::log(M_PI) - std::lgamma(n) + std::lgamma(0.5 * n) +
                        std::lgamma(1.5) - std::lgamma(0.5 * (n + 3));
    return std::exp(logv);
}

namespace {

// Random point at exact Koranyi radius r: normalize a Gaussian draw by dilation.
GroupElement random_at_radius(int n, double r, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        Eigen::VectorXd x(n), y(n);
        for (int i = 0; i < n; ++i) x(i) = gauss(rng);
        for (int i = 0; i < n; ++i) y(i) = gauss(rng);
        const double t = gauss(rng);
        GroupElement g(x, y, t);
        const double nrm = knorm(g);
        if (nrm > 1e-12) return dilate(r / nrm, g);
    }
}

}  // namespace

AdmissibilityReport check_admissible(const KernelSpec& kernel, int sample_count, double r_int,
                                     std::uint64_t seed) {
    if (sample_count < 1) throw UsageError("check_admissible: sample_count must be >= 1");
    if (!(r_int > 0.0)) throw UsageError("check_admissible: R_int must be positive");

    AdmissibilityReport rep;
    rep.sample_count = sample_count;
    rep.finiteness_certified = (kernel.kind() == KernelKind::Fractional);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lo = 1e-6, hi = std::max(10.0, r_int);
    const double p = kernel.exponent();

    double worst_sym = 0.0;
    double emp_mu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sample_count; ++i) {
        const double r = lo * std::pow(hi / lo, unif(rng));  // log-uniform radius
        const GroupElement xi = random_at_radius(kernel.n(), r, rng);
        const double v = kernel.eval(xi);
        const double vi = kernel.eval(inverse(xi));
        worst_sym = std::max(worst_sym, std::abs(v - vi));
        emp_mu = std::min(emp_mu, v * std::pow(knorm(xi), p));
    }
    rep.max_symmetry_violation = worst_sym;
    rep.empirical_mu = emp_mu;
    rep.lower_bound_ok = emp_mu >= kernel.mu() * (1.0 - 1e-9);

    // Annular quadrature of theta*K: radial reduction
    //   int_{B_R} theta K = Q |B_1| int_0^R theta(r) K(r) r^{Q-1} dr
    // on log-spaced panels from 2^-20 to R_int, Simpson per panel.
    const int q_dim = kernel.q_dim();
    const double shell = q_dim * koranyi_unit_ball_volume(kernel.n());
    const double r0 = std::pow(2.0, -20), r1 = r_int;
    const int panels = 4000;
    auto integrand = [&](double r) {
        return std::min(1.0, r * r) * kernel.eval_radius(r) * std::pow(r, q_dim - 1);
    };
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = r0 * std::pow(r1 / r0, double(k) / panels);
        const double b = r0 * std::pow(r1 / r0, double(k + 1) / panels);
        acc += (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
    }
    rep.theta_integral = shell * acc;

    // Tail: fit a local decay exponent K ~ c r^-p_hat at R_int and extrapolate.
    const double ra = 0.9 * r_int, rb = r_int;
    const double ka = kernel.eval_radius(ra), kb = kernel.eval_radius(rb);
    const double p_hat = -std::log(kb / ka) / std::log(rb / ra);
    if (p_hat > q_dim) {
        const double c = kb * std::pow(rb, p_hat);
        rep.theta_tail = shell * c * std::pow(rb, q_dim - p_hat) / (p_hat - q_dim);
        rep.tail_convergent = true;
    } else {
        rep.theta_tail = std::numeric_limits<double>::infinity();
        rep.tail_convergent = false;
    }
    return rep;
}

}  // namespace hvar
