#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "kernel.hpp"

namespace hvar {

enum class ProblemKind { Obstacle, Penalization, MountainPass, VerifyIdentities };

std::string to_string(ProblemKind kind);

/// Validated experiment description. Parsed from versioned JSON with unknown
/// keys rejected, so config typos fail loudly instead of being ignored.
struct ExperimentConfig {
    int schema_version = 1;
    ProblemKind problem = ProblemKind::VerifyIdentities;
    std::uint64_t seed = 0;

    // domain
    DomainSpec::Shape shape = DomainSpec::Shape::Box;
    int n = 1;
    std::vector<double> center;       // length 2N+1 (defaults to origin)
    std::vector<double> half_widths;  // box
    double radius = 0.0;              // ball

    // grid
    double h = 0.0;
    double h_t = 0.0;          // 0 = isotropic default
    double r_trunc = 0.0;      // 0 = default 8 * diam(Omega)
    double delta_sing = -1.0;  // <0 = default h/2
    std::size_t node_cap = 200000;

    // kernel
    double s = 0.5;
    double kernel_scale = 1.0;

    // data (expression strings)
    std::string f_expr = "0";
    std::string phi_expr;
    std::string u0_expr;
    std::string c_expr = "1";

    // solver
    double tol = 1e-10;
    double omega = 1.5;
    int max_iter = 100000;
    double r_base = 0.5;
    int r_count = 10;
    std::vector<double> r_values;  // overrides base/count when nonempty
    double q = 2.5;
    double mp_tol = 1e-8;
    int mp_max_iter = 2000;
    double ls_tol = 1e-9;
    double penal_tol = 1e-12;

    std::string output_prefix;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);

    DomainSpec make_domain() const;
    Grid build_grid() const;
    KernelSpec make_kernel() const;
    double effective_r_trunc() const;
    double effective_delta_sing() const;
    std::vector<double> r_schedule() const;
    std::string prefix() const;
};

}  // namespace hvar
