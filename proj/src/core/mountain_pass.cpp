#include "mountain_pass.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

namespace hvar {

Nonlinearity Nonlinearity::power(double q, Eigen::VectorXd coeff) {
    if (!(q > 2.0)) throw UsageError("nonlinearity: exponent q must exceed 2");
    if (coeff.size() < 1 || !(coeff.minCoeff() > 0.0))
        throw UsageError("nonlinearity: coefficient must be positive");
    Nonlinearity nl;
    nl.q = q;
    nl.coeff = std::move(coeff);
    nl.theta = q;
    nl.r_threshold = 0.0;
    return nl;
}

Nonlinearity Nonlinearity::power_const(double q, double c, Eigen::Index n_interior) {
    return power(q, Eigen::VectorXd::Constant(n_interior, c));
}

double Nonlinearity::f(Eigen::Index i, double l) const {
    if (l == 0.0) return 0.0;
    return coeff(i) * std::pow(std::abs(l), q - 2.0) * l;
}

double Nonlinearity::primitive(Eigen::Index i, double l) const {
    return coeff(i) * std::pow(std::abs(l), q) / q;
}

double Nonlinearity::df_dl(Eigen::Index i, double l) const {
    if (l == 0.0) return 0.0;
    return coeff(i) * (q - 1.0) * std::pow(std::abs(l), q - 2.0);
}

SemilinearProblem SemilinearProblem::from_form(const StiffnessForm& form, Nonlinearity nl,
                                               double s) {
    if (!form.grid) throw UsageError("semilinear problem: form has no grid");
    const Grid& g = *form.grid;
    const Eigen::Index ni = g.interior_count();
    if (nl.coeff.size() != ni)
        throw UsageError("semilinear problem: coefficient must cover interior nodes");
    const double q_dim = homogeneous_dim(g.dim());
    const double q_star = 2.0 * q_dim / (q_dim - 2.0 * s);
    if (!(nl.q > 2.0 && nl.q < q_star))
        throw UsageError("semilinear problem: q must lie strictly inside (2, Q*)");
    SemilinearProblem p;
    p.a_ii = form.matrix.topLeftCorner(ni, ni);
    p.vol = g.volumes().head(ni);
    p.nl = std::move(nl);
    p.grid = form.grid;
    return p;
}

SemilinearProblem SemilinearProblem::from_matrix(const Eigen::MatrixXd& a_ii,
                                                 Eigen::VectorXd vol, Nonlinearity nl) {
    if (a_ii.rows() != a_ii.cols()) throw UsageError("semilinear problem: matrix not square");
    if (vol.size() != a_ii.rows() || !(vol.minCoeff() > 0.0))
        throw UsageError("semilinear problem: volumes must be positive per node");
    if (nl.coeff.size() != a_ii.rows())
        throw UsageError("semilinear problem: coefficient length mismatch");
    SemilinearProblem p;
    p.a_ii = a_ii.sparseView();
    p.a_ii.makeCompressed();
    p.vol = std::move(vol);
    p.nl = std::move(nl);
    return p;
}

double energy(const SemilinearProblem& problem, const Eigen::VectorXd& u) {
    if (u.size() != problem.size()) throw UsageError("energy: field length mismatch");
    double nonlinear = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        nonlinear += problem.nl.primitive(i, u(i)) * problem.vol(i);
    return 0.5 * u.dot(problem.a_ii * u) - nonlinear;
}

Eigen::VectorXd gradient(const SemilinearProblem& problem, const Eigen::VectorXd& u) {
    if (u.size() != problem.size()) throw UsageError("gradient: field length mismatch");
    Eigen::VectorXd g = problem.a_ii * u;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        g(i) -= problem.nl.f(i, u(i)) * problem.vol(i);
    return g;
}

GrowthReport check_growth(const Nonlinearity& nl,
                          const std::vector<std::pair<Eigen::Index, double>>& samples) {
    GrowthReport rep;
    const double c_max = nl.coeff_max();
    rep.eps_used = 1e-3;
    rep.delta_used = c_max / nl.q * (1.0 + 1e-12);

    rep.growth_ok = true;
    rep.ar_ok = true;
    rep.lower_bound_ok = true;
    rep.ar_worst_gap = std::numeric_limits<double>::infinity();
    for (const auto& [i, l] : samples) {
        const double fv = nl.f(i, l);
        const double bound = 2.0 * rep.eps_used * std::abs(l) +
                             nl.q * rep.delta_used * std::pow(std::abs(l), nl.q - 1.0);
        if (std::abs(fv) > bound * (1.0 + 1e-12)) rep.growth_ok = false;
        const double prim = nl.primitive(i, l);
        if (std::abs(l) > nl.r_threshold && l != 0.0) {
            const double gap = l * fv - nl.theta * prim;
            rep.ar_worst_gap = std::min(rep.ar_worst_gap, gap);
            if (nl.theta * prim <= 0.0 || gap < -1e-12 * std::abs(l * fv))
                rep.ar_ok = false;
        }
        const double lower = nl.coeff(i) / nl.q * std::pow(std::abs(l), nl.q);
        if (prim < lower * (1.0 - 1e-12)) rep.lower_bound_ok = false;
    }
    // f(l)/|l| must vanish as l -> 0: the ratio has to decay strictly between
    // l = 1e-2 and l = 1e-6, which holds exactly when q > 2.
    rep.small_l_ratio = c_max * std::pow(1e-6, nl.q - 2.0);
    const double ratio_coarse = c_max * std::pow(1e-2, nl.q - 2.0);
    rep.small_l_ok = rep.small_l_ratio < 0.99 * ratio_coarse;
    return rep;
}

double vol_l2_norm(const SemilinearProblem& problem, const Eigen::VectorXd& u) {
    return std::sqrt(u.cwiseAbs2().dot(problem.vol));
}

double nehari_scale(const SemilinearProblem& problem, const Eigen::VectorXd& u) {
    const double quad = u.dot(problem.a_ii * u);
    double pw = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        pw += problem.nl.coeff(i) * std::pow(std::abs(u(i)), problem.nl.q) * problem.vol(i);
    if (!(pw > 0.0)) throw UsageError("nehari_scale: direction must be nonzero");
    return std::pow(quad / pw, 1.0 / (problem.nl.q - 2.0));
}

namespace {

double min_eig_vol_scaled(const SemilinearProblem& p) {
    Eigen::MatrixXd dense(p.a_ii);
    Eigen::VectorXd inv_sqrt = p.vol.cwiseSqrt().cwiseInverse();
    dense = inv_sqrt.asDiagonal() * dense * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    if (eig.info() != Eigen::Success)
        throw SolverError("mp_geometry: eigensolve failed");
    return eig.eigenvalues().minCoeff();
}

Eigen::VectorXd deterministic_bump(const SemilinearProblem& p) {
    // Positive separable cosine bump on interior nodes; documented seed of the
    // mountain-pass search. Falls back to all-ones without grid geometry.
    const Eigen::Index n = p.size();
    if (!p.grid || !p.grid->has_domain()) return Eigen::VectorXd::Ones(n);
    const Grid& g = *p.grid;
    const DomainSpec& dom = g.domain();
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = 1.0;
        if (dom.shape == DomainSpec::Shape::Box) {
            for (Eigen::Index k = 0; k < g.coords().cols(); ++k) {
                const double rel = (g.coords()(i, k) - dom.center(k)) / dom.half_widths(k);
                v *= std::cos(0.5 * M_PI * std::clamp(rel, -1.0, 1.0));
            }
        } else {
            const double rel = knorm(multiply(
                                   inverse(GroupElement::from_coords(g.dim(), dom.center)),
                                   g.node(i))) /
                               dom.radius;
            v = std::cos(0.5 * M_PI * std::clamp(rel, 0.0, 1.0));
        }
        u(i) = std::max(v, 1e-6);
    }
    return u;
}

}  // namespace

MPGeometry mp_geometry(const SemilinearProblem& problem, int probe_count,
                       std::uint64_t seed) {
    if (probe_count < 0) throw UsageError("mp_geometry: probe_count must be >= 0");
    MPGeometry geom;
    const double q = problem.nl.q;
    geom.kappa = problem.nl.coeff_max() / q *
                 std::pow(problem.vol.minCoeff(), 1.0 - 0.5 * q);
    geom.beta = 0.5 * min_eig_vol_scaled(problem);
    geom.rho = std::pow(1.0 / (q * geom.kappa), 1.0 / (q - 2.0));
    geom.alpha = geom.beta * geom.rho * geom.rho - geom.kappa * std::pow(geom.rho, q);
    if (!(geom.alpha > 0.0))
        throw SolverError("mp_geometry: degenerate geometry, alpha <= 0");

    // Ray search for a point beyond the sphere with negative energy.
    Eigen::VectorXd bump = deterministic_bump(problem);
    double j = 1.0;
    int doublings = 0;
    while (energy(problem, j * bump) >= 0.0) {
        j *= 2.0;
        if (++doublings > 60)
            throw SolverError("mp_geometry: no negative-energy ray point in 60 doublings");
    }
    geom.e = j * bump;
    geom.doublings = doublings;

    // Sanity: sampled points on the rho-sphere must respect the bound.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int p = 0; p < probe_count; ++p) {
        Eigen::VectorXd dir(problem.size());
        for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = gauss(rng);
        const double nrm = vol_l2_norm(problem, dir);
        if (nrm <= 0.0) continue;
        const Eigen::VectorXd probe = (geom.rho / nrm) * dir;
        if (energy(problem, probe) < geom.alpha - 1e-9)
            throw SolverError("mp_geometry: probe below the certified level");
    }
    return geom;
}

MPReport solve_mountain_pass(const SemilinearProblem& problem, double tol, int max_iter) {
    if (!(tol > 0.0)) throw UsageError("solve_mountain_pass: tol must be positive");
    MPReport rep;
    rep.geometry = mp_geometry(problem, 16);

    // Phase 1: descend the energy restricted to the Nehari manifold. Along a
    // ray the maximizer is the closed-form Nehari scaling, so each step
    // re-projects the perturbed direction.
    Eigen::VectorXd u = deterministic_bump(problem);
    u *= nehari_scale(problem, u);
    double e_cur = energy(problem, u);
    rep.iterates.push_back(u);
    double step = 1.0;
    int it = 0;
    const double coarse_tol = std::max(tol, 1e-6);
    for (; it < max_iter; ++it) {
        const Eigen::VectorXd g = gradient(problem, u);
        if (g.cwiseAbs().maxCoeff() <= coarse_tol) break;
        bool accepted = false;
        for (int back = 0; back < 60 && !accepted; ++back) {
            Eigen::VectorXd cand = u - step * g;
            if (cand.cwiseAbs().maxCoeff() == 0.0) { step *= 0.5; continue; }
            double ts;
            try {
                ts = nehari_scale(problem, cand);
            } catch (const UsageError&) {
                step *= 0.5;
                continue;
            }
            cand *= ts;
            const double e_cand = energy(problem, cand);
            if (e_cand < e_cur - 1e-14 * std::abs(e_cur)) {
                u = std::move(cand);
                e_cur = e_cand;
                accepted = true;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        rep.iterates.push_back(u);
        if (!accepted) break;  // stagnation; hand over to Newton polish
    }

    // Phase 2: Newton on the Euler-Lagrange system A u = f(u) vol. Near the
    // Nehari minimizer the Jacobian is nonsingular and convergence is
    // quadratic down to round-off.
    const Eigen::Index n = problem.size();
    Eigen::MatrixXd a_dense(problem.a_ii);
    for (int newton = 0; newton < 60; ++newton) {
        const Eigen::VectorXd g = gradient(problem, u);
        if (g.cwiseAbs().maxCoeff() <= 0.25 * tol) break;
        Eigen::MatrixXd jac = a_dense;
        for (Eigen::Index i = 0; i < n; ++i)
            jac(i, i) -= problem.nl.df_dl(i, u(i)) * problem.vol(i);
        const Eigen::VectorXd delta = jac.partialPivLu().solve(-g);
        if (!delta.allFinite()) break;
        u += delta;
        rep.iterates.push_back(u);
    }

    const Eigen::VectorXd g_final = gradient(problem, u);
    rep.grad_inf = g_final.cwiseAbs().maxCoeff();
    rep.u_star = u;
    rep.energy_star = energy(problem, u);
    rep.iterations = static_cast<int>(rep.iterates.size());
    if (rep.grad_inf > tol) {
        std::ostringstream msg;
        msg << "solve_mountain_pass: stagnation, |grad|_inf = " << rep.grad_inf;
        const PSReport ps = ps_diagnostics(problem, rep.iterates);
        msg << "; sup ||u||_Z0 = " << ps.sup_z0_norm
            << ", grad trend down = " << (ps.grad_trend_down ? "yes" : "no");
        throw SolverError(msg.str());
    }
    if (rep.energy_star < rep.geometry.alpha * (1.0 - 1e-6))
        throw SolverError("solve_mountain_pass: converged below the mountain-pass level");
    return rep;
}

PSReport ps_diagnostics(const SemilinearProblem& problem,
                        const std::vector<Eigen::VectorXd>& iterates) {
    if (iterates.size() < 2)
        throw UsageError("ps_diagnostics: need at least two iterates");
    PSReport rep;
    rep.ar_bound_ok = true;
    rep.ar_worst_gap = std::numeric_limits<double>::infinity();
    const double theta = problem.nl.theta;
    for (const auto& u : iterates) {
        const double nrm2 = u.dot(problem.a_ii * u);
        rep.sup_z0_norm = std::max(rep.sup_z0_norm, std::sqrt(std::max(0.0, nrm2)));
        const double lhs = (0.5 - 1.0 / theta) * nrm2;
        const double rhs = energy(problem, u) - gradient(problem, u).dot(u) / theta;
        rep.ar_worst_gap = std::min(rep.ar_worst_gap, rhs - lhs);
        if (rhs < lhs - 1e-9 * std::max(1.0, std::abs(lhs))) rep.ar_bound_ok = false;
        rep.grad_norms.push_back(gradient(problem, u).cwiseAbs().maxCoeff());
    }
    rep.grad_trend_down = rep.grad_norms.back() <= rep.grad_norms.front();
    return rep;
}

}  // namespace hvar
