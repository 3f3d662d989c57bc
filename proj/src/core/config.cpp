#include "config.hpp"

#include <fstream>
#include <json.hpp>

#include "expr.hpp"

namespace hvar {

using nlohmann::json;

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Obstacle: return "obstacle";
        case ProblemKind::Penalization: return "penalization";
        case ProblemKind::MountainPass: return "mountain_pass";
        case ProblemKind::VerifyIdentities: return "verify_identities";
    }
    return "?";
}

namespace {

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) { known = true; break; }
        if (!known)
            throw UsageError(std::string("config: unknown key '") + item.key() + "' in " +
                             where);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
T get_required(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key))
        throw UsageError(std::string("config: missing key '") + key + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: JSON parse failure: ") + e.what());
    }
    if (!root.is_object()) throw UsageError("config: top level must be a JSON object");
    reject_unknown_keys(root, "the top level",
                        {"schema_version", "problem", "seed", "domain", "grid", "kernel",
                         "data", "solver", "output"});

    ExperimentConfig c;
    c.schema_version = get_required<int>(root, "the top level", "schema_version");
    if (c.schema_version != 1)
        throw UsageError("config: unsupported schema_version (expected 1)");

    const std::string kind = get_required<std::string>(root, "the top level", "problem");
    if (kind == "obstacle") c.problem = ProblemKind::Obstacle;
    else if (kind == "penalization") c.problem = ProblemKind::Penalization;
    else if (kind == "mountain_pass") c.problem = ProblemKind::MountainPass;
    else if (kind == "verify_identities") c.problem = ProblemKind::VerifyIdentities;
    else throw UsageError("config: unknown problem kind '" + kind + "'");

    c.seed = get_or<std::uint64_t>(root, "seed", 0);

    const json dom = root.contains("domain") ? root.at("domain") : json::object();
    reject_unknown_keys(dom, "'domain'", {"shape", "N", "center", "half_widths", "radius"});
    const std::string shape = get_or<std::string>(dom, "shape", "box");
    if (shape == "box") c.shape = DomainSpec::Shape::Box;
    else if (shape == "koranyi_ball") c.shape = DomainSpec::Shape::KoranyiBall;
    else throw UsageError("config: unknown domain shape '" + shape + "'");
    c.n = get_or<int>(dom, "N", 1);
    if (c.n < 1) throw UsageError("config: N must be >= 1");
    c.center = get_or<std::vector<double>>(dom, "center",
                                           std::vector<double>(2 * c.n + 1, 0.0));
    if (c.shape == DomainSpec::Shape::Box)
        c.half_widths = get_required<std::vector<double>>(dom, "'domain'", "half_widths");
    else
        c.radius = get_required<double>(dom, "'domain'", "radius");

    const json grid = root.contains("grid") ? root.at("grid") : json::object();
    reject_unknown_keys(grid, "'grid'", {"h", "h_t", "R_trunc", "delta_sing", "node_cap"});
    c.h = get_required<double>(grid, "'grid'", "h");
    c.h_t = get_or<double>(grid, "h_t", 0.0);
    c.r_trunc = get_or<double>(grid, "R_trunc", 0.0);
    c.delta_sing = get_or<double>(grid, "delta_sing", -1.0);
    c.node_cap = get_or<std::size_t>(grid, "node_cap", 200000);

    const json kern = root.contains("kernel") ? root.at("kernel") : json::object();
    reject_unknown_keys(kern, "'kernel'", {"s", "scale"});
    c.s = get_or<double>(kern, "s", 0.5);
    c.kernel_scale = get_or<double>(kern, "scale", 1.0);
    if (!(c.s > 0.0 && c.s < 1.0)) throw UsageError("config: kernel s must lie in (0,1)");
    if (!(c.kernel_scale > 0.0)) throw UsageError("config: kernel scale must be positive");

    const json data = root.contains("data") ? root.at("data") : json::object();
    reject_unknown_keys(data, "'data'", {"f", "phi", "u0", "c"});
    c.f_expr = get_or<std::string>(data, "f", "0");
    c.phi_expr = get_or<std::string>(data, "phi", "");
    c.u0_expr = get_or<std::string>(data, "u0", "");
    c.c_expr = get_or<std::string>(data, "c", "1");
    const bool needs_obstacle_data =
        c.problem == ProblemKind::Obstacle || c.problem == ProblemKind::Penalization;
    if (needs_obstacle_data && (c.phi_expr.empty() || c.u0_expr.empty()))
        throw UsageError("config: obstacle problems require data.phi and data.u0");
    // Parse now so syntax errors surface at validation time.
    Expression::parse(c.f_expr, c.n);
    Expression::parse(c.c_expr, c.n);
    if (!c.phi_expr.empty()) Expression::parse(c.phi_expr, c.n);
    if (!c.u0_expr.empty()) Expression::parse(c.u0_expr, c.n);

    const json solver = root.contains("solver") ? root.at("solver") : json::object();
    reject_unknown_keys(solver, "'solver'",
                        {"tol", "omega", "max_iter", "r_schedule", "q", "mp_tol",
                         "mp_max_iter", "ls_tol", "penal_tol"});
    c.tol = get_or<double>(solver, "tol", 1e-10);
    c.omega = get_or<double>(solver, "omega", 1.5);
    c.max_iter = get_or<int>(solver, "max_iter", 100000);
    c.q = get_or<double>(solver, "q", 2.5);
    c.mp_tol = get_or<double>(solver, "mp_tol", 1e-8);
    c.mp_max_iter = get_or<int>(solver, "mp_max_iter", 2000);
    c.ls_tol = get_or<double>(solver, "ls_tol", 1e-9);
    c.penal_tol = get_or<double>(solver, "penal_tol", 1e-12);
    if (solver.contains("r_schedule")) {
        const json rs = solver.at("r_schedule");
        if (rs.is_array()) {
            c.r_values = rs.get<std::vector<double>>();
        } else {
            reject_unknown_keys(rs, "'r_schedule'", {"base", "count"});
            c.r_base = get_or<double>(rs, "base", 0.5);
            c.r_count = get_or<int>(rs, "count", 10);
        }
    }
    if (!(c.tol > 0.0) || !(c.omega > 0.0 && c.omega < 2.0) || c.max_iter < 1)
        throw UsageError("config: solver parameters out of range");

    const json output = root.contains("output") ? root.at("output") : json::object();
    reject_unknown_keys(output, "'output'", {"prefix"});
    c.output_prefix = get_or<std::string>(output, "prefix", "");

    if (!(c.h > 0.0)) throw UsageError("config: grid.h must be positive");
    for (double r : c.r_schedule())
        if (!(r > 0.0 && r < 1.0))
            throw UsageError("config: r-schedule values must lie in (0,1)");
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

DomainSpec ExperimentConfig::make_domain() const {
    Eigen::VectorXd ctr = Eigen::Map<const Eigen::VectorXd>(center.data(),
                                                            static_cast<Eigen::Index>(center.size()));
    if (ctr.size() != 2 * n + 1)
        throw UsageError("config: domain.center must have length 2N+1");
    if (shape == DomainSpec::Shape::Box) {
        if (static_cast<int>(half_widths.size()) != 2 * n + 1)
            throw UsageError("config: domain.half_widths must have length 2N+1");
        Eigen::VectorXd hw = Eigen::Map<const Eigen::VectorXd>(
            half_widths.data(), static_cast<Eigen::Index>(half_widths.size()));
        return DomainSpec::box(n, ctr, hw);
    }
    return DomainSpec::koranyi_ball(n, ctr, radius);
}

double ExperimentConfig::effective_r_trunc() const {
    if (r_trunc > 0.0) return r_trunc;
    return 8.0 * make_domain().diameter_estimate();
}

double ExperimentConfig::effective_delta_sing() const {
    return delta_sing >= 0.0 ? delta_sing : 0.5 * h;
}

Grid ExperimentConfig::build_grid() const {
    return Grid::build(make_domain(), h, effective_r_trunc(), h_t, node_cap);
}

KernelSpec ExperimentConfig::make_kernel() const {
    return KernelSpec::fractional(s, n, kernel_scale);
}

std::vector<double> ExperimentConfig::r_schedule() const {
    if (!r_values.empty()) return r_values;
    std::vector<double> out;
    double r = 1.0;
    for (int k = 1; k <= r_count; ++k) {
        r *= r_base;
        out.push_back(r);
    }
    return out;
}

std::string ExperimentConfig::prefix() const {
    return output_prefix.empty() ? to_string(problem) : output_prefix;
}

}  // namespace hvar
