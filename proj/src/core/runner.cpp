#include "runner.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "expr.hpp"
#include "io.hpp"
#include "mountain_pass.hpp"
#include "obstacle.hpp"

namespace hvar {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string out_path(const RunOptions& opt, const ExperimentConfig& cfg,
                     const std::string& suffix) {
    fs::create_directories(opt.out_dir);
    return (fs::path(opt.out_dir) / (cfg.prefix() + suffix)).string();
}

Eigen::VectorXd eval_on_nodes(const Expression& expr, const Grid& grid, Eigen::Index count) {
    Eigen::VectorXd out(count);
    for (Eigen::Index i = 0; i < count; ++i) out(i) = expr.eval(grid.node(i));
    return out;
}

double truncation_tail_mass(const ExperimentConfig& cfg) {
    // Kernel mass dropped beyond the truncation ball; O(R^{-2s}) and reported
    // rather than corrected.
    const double r = cfg.effective_r_trunc();
    const int q_dim = homogeneous_dim(cfg.n);
    return q_dim * koranyi_unit_ball_volume(cfg.n) * cfg.kernel_scale *
           std::pow(r, -2.0 * cfg.s) / (2.0 * cfg.s);
}

ordered_json grid_summary(const Grid& grid, const ExperimentConfig& cfg) {
    return ordered_json{{"nodes", grid.node_count()},
                        {"interior", grid.interior_count()},
                        {"h", cfg.h},
                        {"h_t", grid.spacing_t()},
                        {"R_trunc", grid.truncation_radius()},
                        {"delta_sing", cfg.effective_delta_sing()},
                        {"truncation_tail_mass", truncation_tail_mass(cfg)}};
}

void emit(const RunOptions& opt, const std::string& line) {
    if (!opt.quiet) std::cout << line << "\n";
}

struct AssembledData {
    std::shared_ptr<const Grid> grid;
    KernelSpec kernel;
    StiffnessForm form;
};

AssembledData assemble_from_config(const ExperimentConfig& cfg, const RunOptions& opt) {
    auto grid = std::make_shared<Grid>(cfg.build_grid());
    KernelSpec kernel = cfg.make_kernel();
    StiffnessForm form =
        assemble_stiffness(grid, kernel, cfg.effective_delta_sing(), opt.threads);
    return {std::move(grid), std::move(kernel), std::move(form)};
}

ObstacleProblem obstacle_from_config(const ExperimentConfig& cfg, const AssembledData& a) {
    const Grid& g = *a.grid;
    const Expression f = Expression::parse(cfg.f_expr, cfg.n);
    const Expression phi = Expression::parse(cfg.phi_expr, cfg.n);
    const Expression u0 = Expression::parse(cfg.u0_expr, cfg.n);
    return ObstacleProblem::from_form(a.form, eval_on_nodes(f, g, g.interior_count()),
                                      eval_on_nodes(phi, g, g.node_count()),
                                      eval_on_nodes(u0, g, g.node_count()));
}

std::string ls_solution_csv(const ObstacleProblem& problem, const Eigen::VectorXd& u,
                            const LSReport& ls) {
    std::ostringstream csv;
    csv << "id,u,phi,L,U,margin\n";
    for (Eigen::Index i = 0; i < problem.node_count(); ++i) {
        csv << i << ',' << format_double(u(i)) << ',' << format_double(problem.phi(i));
        if (i < problem.n_interior) {
            const double margin = std::min(ls.lower(i), ls.upper(i) - ls.lower(i));
            csv << ',' << format_double(ls.lower(i)) << ',' << format_double(ls.upper(i))
                << ',' << format_double(margin);
        } else {
            csv << ",,,";
        }
        csv << '\n';
    }
    return csv.str();
}

RunOutcome run_obstacle(const ExperimentConfig& cfg, const RunOptions& opt) {
    AssembledData a = assemble_from_config(cfg, opt);
    ObstacleProblem problem = obstacle_from_config(cfg, a);
    const VISolution vi = solve_vi_psor(problem, cfg.omega, cfg.tol, cfg.max_iter);
    const LSReport ls = verify_lewy_stampacchia(problem, vi.u, cfg.ls_tol);

    const std::string csv_path = out_path(opt, cfg, "_solution.csv");
    write_text_file(csv_path, ls_solution_csv(problem, vi.u, ls));

    ordered_json report{
        {"schema_version", 1},
        {"problem", "obstacle"},
        {"pass", ls.pass},
        {"lewy_stampacchia",
         {{"pass", ls.pass},
          {"worst_lower", ls.worst_lower},
          {"worst_upper", ls.worst_upper},
          {"tol", ls.tol}}},
        {"solver",
         {{"iterations", vi.iterations},
          {"pg_norm", vi.pg_norm},
          {"tol", cfg.tol},
          {"omega", cfg.omega},
          {"active_nodes", vi.active_set.size()}}},
        {"grid", grid_summary(*a.grid, cfg)},
        {"kernel", {{"s", cfg.s}, {"scale", cfg.kernel_scale}}},
        {"seed", cfg.seed},
        {"outputs", {{"solution_csv", fs::path(csv_path).filename().string()}}}};
    RunOutcome outcome;
    outcome.verification_pass = ls.pass;
    outcome.report_path = out_path(opt, cfg, "_report.json");
    write_text_file(outcome.report_path, report.dump(2) + "\n");
    emit(opt, std::string("obstacle: LS ") + (ls.pass ? "pass" : "FAIL"));
    return outcome;
}

RunOutcome run_penalization(const ExperimentConfig& cfg, const RunOptions& opt) {
    AssembledData a = assemble_from_config(cfg, opt);
    ObstacleProblem problem = obstacle_from_config(cfg, a);
    const VISolution vi = solve_vi_psor(problem, cfg.omega, cfg.tol, cfg.max_iter);
    const auto path = run_penalization_path(problem, cfg.r_schedule(), cfg.penal_tol);

    bool monotone = true;
    std::ostringstream csv;
    csv << "k,r,sup_violation,newton_iterations,diff_vs_vi\n";
    double prev = std::numeric_limits<double>::infinity();
    double final_diff = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto& st = path[k];
        if (st.violation_sup > prev + 1e-12) monotone = false;
        prev = st.violation_sup;
        final_diff = (st.u - vi.u).cwiseAbs().maxCoeff();
        csv << (k + 1) << ',' << format_double(st.r) << ','
            << format_double(st.violation_sup) << ',' << st.newton_iterations << ','
            << format_double(final_diff) << '\n';
    }
    const std::string path_csv = out_path(opt, cfg, "_path.csv");
    write_text_file(path_csv, csv.str());

    const LSReport ls = verify_lewy_stampacchia(problem, vi.u, cfg.ls_tol);
    const std::string sol_csv = out_path(opt, cfg, "_solution.csv");
    write_text_file(sol_csv, ls_solution_csv(problem, vi.u, ls));

    const bool pass = monotone && ls.pass;
    ordered_json report{
        {"schema_version", 1},
        {"problem", "penalization"},
        {"pass", pass},
        {"penalization",
         {{"monotone_violation", monotone},
          {"final_r", path.back().r},
          {"final_sup_violation", path.back().violation_sup},
          {"final_diff_vs_vi", final_diff},
          {"steps", path.size()}}},
        {"lewy_stampacchia",
         {{"pass", ls.pass},
          {"worst_lower", ls.worst_lower},
          {"worst_upper", ls.worst_upper},
          {"tol", ls.tol}}},
        {"grid", grid_summary(*a.grid, cfg)},
        {"kernel", {{"s", cfg.s}, {"scale", cfg.kernel_scale}}},
        {"seed", cfg.seed},
        {"outputs",
         {{"path_csv", fs::path(path_csv).filename().string()},
          {"solution_csv", fs::path(sol_csv).filename().string()}}}};
    RunOutcome outcome;
    outcome.verification_pass = pass;
    outcome.report_path = out_path(opt, cfg, "_report.json");
    write_text_file(outcome.report_path, report.dump(2) + "\n");
    emit(opt, std::string("penalization: ") + (pass ? "pass" : "FAIL"));
    return outcome;
}

RunOutcome run_mountain_pass(const ExperimentConfig& cfg, const RunOptions& opt) {
    AssembledData a = assemble_from_config(cfg, opt);
    const Grid& g = *a.grid;
    const Expression c_expr = Expression::parse(cfg.c_expr, cfg.n);
    Nonlinearity nl =
        Nonlinearity::power(cfg.q, eval_on_nodes(c_expr, g, g.interior_count()));
    SemilinearProblem problem = SemilinearProblem::from_form(a.form, std::move(nl), cfg.s);
    const MPReport rep = solve_mountain_pass(problem, cfg.mp_tol, cfg.mp_max_iter);

    std::ostringstream csv;
    csv << "id";
    for (int k = 1; k <= cfg.n; ++k) csv << ",x" << k;
    for (int k = 1; k <= cfg.n; ++k) csv << ",y" << k;
    csv << ",t,u\n";
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        csv << i;
        for (Eigen::Index k = 0; k < g.coords().cols(); ++k)
            csv << ',' << format_double(g.coords()(i, k));
        csv << ',' << format_double(i < g.interior_count() ? rep.u_star(i) : 0.0) << '\n';
    }
    const std::string csv_path = out_path(opt, cfg, "_solution.csv");
    write_text_file(csv_path, csv.str());

    ordered_json report{
        {"schema_version", 1},
        {"problem", "mountain_pass"},
        {"pass", true},
        {"geometry",
         {{"alpha", rep.geometry.alpha},
          {"rho", rep.geometry.rho},
          {"kappa", rep.geometry.kappa},
          {"beta", rep.geometry.beta},
          {"ray_doublings", rep.geometry.doublings}}},
        {"critical_point",
         {{"energy", rep.energy_star},
          {"grad_inf", rep.grad_inf},
          {"iterations", rep.iterations},
          {"q", cfg.q}}},
        {"grid", grid_summary(g, cfg)},
        {"kernel", {{"s", cfg.s}, {"scale", cfg.kernel_scale}}},
        {"seed", cfg.seed},
        {"outputs", {{"solution_csv", fs::path(csv_path).filename().string()}}}};
    RunOutcome outcome;
    outcome.verification_pass = true;
    outcome.report_path = out_path(opt, cfg, "_report.json");
    write_text_file(outcome.report_path, report.dump(2) + "\n");
    emit(opt, "mountain_pass: pass");
    return outcome;
}

// ---------------------------------------------------------------------------
// verify_identities suites
// ---------------------------------------------------------------------------

GroupElement random_element(int n, std::mt19937_64& rng, double span = 10.0) {
    std::uniform_real_distribution<double> unif(-span, span);
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) x(i) = unif(rng);
    for (int i = 0; i < n; ++i) y(i) = unif(rng);
    return GroupElement(x, y, unif(rng));
}

double max_component_diff(const GroupElement& a, const GroupElement& b) {
    return (a.coords() - b.coords()).cwiseAbs().maxCoeff();
}

ordered_json suite_group_axioms(const ExperimentConfig& cfg, bool& pass) {
    std::mt19937_64 rng(cfg.seed + 1);
    std::uniform_real_distribution<double> unif(0.1, 4.0);
    double worst_assoc = 0.0, worst_inv = 0.0, worst_norm_inv = 0.0, worst_homog = 0.0;
    const int trials = 10000;
    for (int k = 0; k < trials; ++k) {
        const GroupElement a = random_element(cfg.n, rng);
        const GroupElement b = random_element(cfg.n, rng);
        const GroupElement c = random_element(cfg.n, rng);
        worst_assoc = std::max(
            worst_assoc, max_component_diff(multiply(multiply(a, b), c),
                                            multiply(a, multiply(b, c))));
        worst_inv = std::max(worst_inv,
                             max_component_diff(multiply(a, inverse(a)),
                                                GroupElement::zero(cfg.n)));
        worst_norm_inv = std::max(worst_norm_inv, std::abs(knorm(inverse(a)) - knorm(a)));
        const double theta = unif(rng);
        worst_homog = std::max(worst_homog,
                               std::abs(knorm(dilate(theta, a)) - theta * knorm(a)) /
                                   std::max(1.0, theta * knorm(a)));
    }
    const bool ok = worst_assoc <= 1e-12 && worst_inv <= 1e-12 && worst_norm_inv == 0.0 &&
                    worst_homog <= 1e-12;
    pass = pass && ok;
    return ordered_json{{"name", "group_axioms"},
                        {"pass", ok},
                        {"trials", trials},
                        {"max_associativity_defect", worst_assoc},
                        {"max_inverse_defect", worst_inv},
                        {"max_inverse_norm_defect", worst_norm_inv},
                        {"max_homogeneity_defect", worst_homog}};
}

struct CommutatorCase {
    ScalarField f;
    ScalarField df_dt;
};

std::vector<CommutatorCase> commutator_functions() {
    std::vector<CommutatorCase> cases;
    cases.push_back({[](const GroupElement& p) { return std::sin(p.x()(0)) * std::cos(p.t()); },
                     [](const GroupElement& p) { return -std::sin(p.x()(0)) * std::sin(p.t()); }});
    cases.push_back({[](const GroupElement& p) { return p.x()(0) * p.y()(0) + p.t() * p.t(); },
                     [](const GroupElement& p) { return 2.0 * p.t(); }});
    cases.push_back({[](const GroupElement& p) { return std::exp(0.3 * p.x()(0)) * std::sin(p.y()(0)); },
                     [](const GroupElement&) { return 0.0; }});
    cases.push_back({[](const GroupElement& p) { return std::cos(p.x()(0) + p.y()(0) + p.t()); },
                     [](const GroupElement& p) { return -std::sin(p.x()(0) + p.y()(0) + p.t()); }});
    cases.push_back({[](const GroupElement& p) {
                         return p.x()(0) * p.x()(0) * p.t() - p.y()(0) * p.y()(0) * p.y()(0);
                     },
                     [](const GroupElement& p) { return p.x()(0) * p.x()(0); }});
    return cases;
}

double bracket(const VectorFieldStencil& fa, const VectorFieldStencil& fb,
               const ScalarField& f, const GroupElement& p) {
    auto bf = [&](const GroupElement& q) { return apply_vector_field(fb, f, q); };
    auto af = [&](const GroupElement& q) { return apply_vector_field(fa, f, q); };
    return apply_vector_field(fa, bf, p) - apply_vector_field(fb, af, p);
}

ordered_json suite_commutators(const ExperimentConfig& cfg, bool& pass) {
    const int n = cfg.n;
    const auto cases = commutator_functions();
    std::vector<GroupElement> points;
    {
        std::mt19937_64 rng(cfg.seed + 2);
        for (int k = 0; k < 3; ++k) points.push_back(random_element(n, rng, 0.8));
    }
    const std::vector<double> hs{1e-2, 5e-3, 2.5e-3};

    // Bracket battery: [X_j, Y_j] -> -4 d/dt, everything else -> 0.
    struct Entry { FieldKind ka; int ja; FieldKind kb; int jb; bool minus4; };
    std::vector<Entry> entries;
    entries.push_back({FieldKind::X, 1, FieldKind::Y, 1, true});
    entries.push_back({FieldKind::X, 1, FieldKind::T, 1, false});
    entries.push_back({FieldKind::Y, 1, FieldKind::T, 1, false});
    if (n >= 2) {
        entries.push_back({FieldKind::X, 1, FieldKind::X, 2, false});
        entries.push_back({FieldKind::Y, 1, FieldKind::Y, 2, false});
        entries.push_back({FieldKind::X, 1, FieldKind::Y, 2, false});
        entries.push_back({FieldKind::X, 2, FieldKind::Y, 2, true});
    }

    std::vector<double> errs;
    for (double h : hs) {
        double worst = 0.0;
        for (const auto& e : entries)
            for (const auto& cse : cases)
                for (const auto& p : points) {
                    const double got = bracket({e.ka, e.ja, h}, {e.kb, e.jb, h}, cse.f, p);
                    const double want = e.minus4 ? -4.0 * cse.df_dt(p) : 0.0;
                    worst = std::max(worst, std::abs(got - want));
                }
        errs.push_back(worst);
    }
    double min_order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
        if (errs[k] < 1e-12) continue;  // already at round-off
        min_order = std::min(min_order, std::log2(errs[k] / errs[k + 1]));
    }
    const bool ok = errs.back() < 1e-3 && min_order >= 1.9;
    pass = pass && ok;
    return ordered_json{{"name", "commutators"},
                        {"pass", ok},
                        {"errors", errs},
                        {"min_observed_order", min_order}};
}

ordered_json suite_admissibility(const ExperimentConfig& cfg, bool& pass) {
    const KernelSpec kernel = cfg.make_kernel();
    const AdmissibilityReport rep = check_admissible(kernel, 2000, 10.0, cfg.seed + 3);
    const bool ok = rep.max_symmetry_violation == 0.0 && rep.lower_bound_ok &&
                    rep.tail_convergent;
    pass = pass && ok;
    return ordered_json{{"name", "kernel_admissibility"},
                        {"pass", ok},
                        {"max_symmetry_violation", rep.max_symmetry_violation},
                        {"empirical_mu", rep.empirical_mu},
                        {"theta_integral", rep.theta_integral},
                        {"theta_tail", rep.theta_tail},
                        {"finiteness_certified", rep.finiteness_certified}};
}

Eigen::VectorXd smooth_bump_field(const Grid& grid) {
    // C^2 separable bump supported in the domain box; zero on exterior nodes.
    const DomainSpec& dom = grid.domain();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.node_count());
    for (Eigen::Index i = 0; i < grid.interior_count(); ++i) {
        double w = 1.0;
        if (dom.shape == DomainSpec::Shape::Box) {
            for (Eigen::Index k = 0; k < grid.coords().cols(); ++k) {
                const double rel = (grid.coords()(i, k) - dom.center(k)) / dom.half_widths(k);
                const double clipped = std::max(0.0, 1.0 - rel * rel);
                w *= clipped * clipped * clipped;
            }
        } else {
            const double rel =
                knorm(multiply(inverse(GroupElement::from_coords(grid.dim(), dom.center)),
                               grid.node(i))) /
                dom.radius;
            const double clipped = std::max(0.0, 1.0 - rel * rel);
            w = clipped * clipped * clipped;
        }
        v(i) = w;
    }
    return v;
}

ordered_json suite_duality(const ExperimentConfig& cfg, const AssembledData& a, bool& pass) {
    const Grid& g = *a.grid;
    std::mt19937_64 rng(cfg.seed + 4);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd u(g.node_count());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = unif(rng);
    const Eigen::VectorXd v = smooth_bump_field(g);
    const double lhs = bilinear(a.form, u, v);
    const double residual =
        duality_residual(g, a.kernel, u, v, cfg.effective_delta_sing());
    const bool ok = residual <= 1e-10 * (1.0 + std::abs(lhs));
    pass = pass && ok;
    return ordered_json{{"name", "duality_identity"},
                        {"pass", ok},
                        {"residual", residual},
                        {"bilinear_value", lhs}};
}

ordered_json suite_form_properties(const ExperimentConfig& cfg, const AssembledData& a,
                                   bool& pass) {
    const Grid& g = *a.grid;
    const Eigen::Index ni = g.interior_count();

    Eigen::SparseMatrix<double> diff =
        a.form.matrix - Eigen::SparseMatrix<double>(a.form.matrix.transpose());
    double asym = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
            asym = std::max(asym, std::abs(it.value()));

    double min_eig = 0.0;
    if (ni <= 500) {
        Eigen::MatrixXd a_ii(a.form.matrix.topLeftCorner(ni, ni));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_ii);
        min_eig = eig.eigenvalues().minCoeff();
    }

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.node_count());
    const double const_op =
        apply_operator(g, a.kernel, ones, cfg.effective_delta_sing()).cwiseAbs().maxCoeff();

    std::mt19937_64 rng(cfg.seed + 5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(g.node_count());
        for (Eigen::Index i = 0; i < ni; ++i) u(i) = unif(rng);
        const double z0 = z0_norm(a.form, u);
        const double gag = gagliardo_seminorm(g, u, cfg.s, cfg.effective_delta_sing());
        worst_gap = std::min(worst_gap,
                             z0 * z0 - a.kernel.mu() * gag * gag + 1e-12 * z0 * z0);
    }

    const bool ok = asym == 0.0 && min_eig >= -1e-10 && const_op == 0.0 && worst_gap >= 0.0;
    pass = pass && ok;
    return ordered_json{{"name", "form_properties"},
                        {"pass", ok},
                        {"max_asymmetry", asym},
                        {"min_interior_eigenvalue", min_eig},
                        {"operator_on_constants", const_op},
                        {"kernel_bound_worst_gap", worst_gap}};
}

RunOutcome run_identities(const ExperimentConfig& cfg, const RunOptions& opt) {
    bool pass = true;
    ordered_json suites = ordered_json::array();
    suites.push_back(suite_group_axioms(cfg, pass));
    suites.push_back(suite_commutators(cfg, pass));
    suites.push_back(suite_admissibility(cfg, pass));
    AssembledData a = assemble_from_config(cfg, opt);
    suites.push_back(suite_duality(cfg, a, pass));
    suites.push_back(suite_form_properties(cfg, a, pass));

    ordered_json report{{"schema_version", 1},
                        {"problem", "verify_identities"},
                        {"pass", pass},
                        {"suites", suites},
                        {"grid", grid_summary(*a.grid, cfg)},
                        {"kernel", {{"s", cfg.s}, {"scale", cfg.kernel_scale}}},
                        {"seed", cfg.seed}};
    RunOutcome outcome;
    outcome.verification_pass = pass;
    outcome.report_path = out_path(opt, cfg, "_report.json");
    write_text_file(outcome.report_path, report.dump(2) + "\n");
    emit(opt, std::string("verify_identities: ") + (pass ? "pass" : "FAIL"));
    return outcome;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    switch (config.problem) {
        case ProblemKind::Obstacle: return run_obstacle(config, options);
        case ProblemKind::Penalization: return run_penalization(config, options);
        case ProblemKind::MountainPass: return run_mountain_pass(config, options);
        case ProblemKind::VerifyIdentities: return run_identities(config, options);
    }
    throw UsageError("run_experiment: unknown problem kind");
}

RunOutcome run_verify(const ExperimentConfig& config, const RunOptions& options) {
    return run_identities(config, options);
}

std::string export_grid(const ExperimentConfig& config, const RunOptions& options) {
    const Grid grid = config.build_grid();
    const std::string path = out_path(options, config, "_grid.csv");
    write_grid_csv(grid, path);
    emit(options, "grid exported: " + path);
    return path;
}

}  // namespace hvar
