#include "assembly.hpp"

#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hvar {

namespace {

// Neumaier-compensated accumulator; keeps long pair sums at O(eps) relative error.
struct Compensated {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

void run_rows(Eigen::Index count, int threads, const std::function<void(Eigen::Index)>& row) {
    threads = std::max(threads, 1);
    if (threads == 1 || count < 2 * threads) {
        for (Eigen::Index i = 0; i < count; ++i) row(i);
        return;
    }
    // Static row partition; every row is computed by exactly one worker in a
    // fixed inner order, so results do not depend on the worker count.
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const Eigen::Index chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const Eigen::Index lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (Eigen::Index i = lo; i < hi; ++i) row(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

StiffnessForm assemble_stiffness(std::shared_ptr<const Grid> grid, const KernelSpec& kernel,
                                 double delta_sing, int threads) {
    if (!grid) throw UsageError("assemble_stiffness: null grid");
    if (delta_sing < 0.0) throw UsageError("assemble_stiffness: delta_sing must be >= 0");
    if (kernel.n() != grid->dim())
        throw UsageError("assemble_stiffness: kernel/grid dimension mismatch");

    const Grid& g = *grid;
    const Eigen::Index n = g.node_count();
    const Eigen::Index ni = g.interior_count();
    const double cut4 = std::pow(delta_sing, 4);

    // Off-diagonals: row i (interior) owns every pair (i, j) with j > i.
    std::vector<std::vector<Eigen::Triplet<double>>> rows(static_cast<std::size_t>(ni));
    run_rows(ni, threads, [&](Eigen::Index i) {
        auto& out = rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double n4 = g.rel_knorm4(i, j);
            if (n4 == 0.0)
                throw SingularityError("assemble_stiffness: coincident nodes");
            if (n4 < cut4) continue;
            const double w = 2.0 * kernel.eval_knorm4(n4) * g.volume(i) * g.volume(j);
            out.emplace_back(static_cast<int>(i), static_cast<int>(j), -w);
        }
    });

    // Diagonal: full sweep per row in ascending j order (bit-identical for any
    // worker count, and exterior rows couple back to the interior).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    run_rows(n, threads, [&](Eigen::Index i) {
        const Eigen::Index j_end = (i < ni) ? n : ni;
        double acc = 0.0;
        for (Eigen::Index j = 0; j < j_end; ++j) {
            if (j == i) continue;
            const double n4 = g.rel_knorm4(i, j);
            if (n4 == 0.0)
                throw SingularityError("assemble_stiffness: coincident nodes");
            if (n4 < cut4) continue;
            acc += 2.0 * kernel.eval_knorm4(n4) * g.volume(i) * g.volume(j);
        }
        diag(i) = acc;
    });

    std::vector<Eigen::Triplet<double>> trips;
    std::size_t nnz = static_cast<std::size_t>(n);
    for (const auto& r : rows) nnz += 2 * r.size();
    trips.reserve(nnz);
    double max_abs = diag.size() ? diag.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& r : rows)
        for (const auto& t : r) max_abs = std::max(max_abs, std::abs(t.value()));
    const double drop = 1e-16 * max_abs;
    for (Eigen::Index i = 0; i < n; ++i)
        if (diag(i) != 0.0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), diag(i));
    for (const auto& r : rows)
        for (const auto& t : r) {
            if (std::abs(t.value()) < drop) continue;
            trips.push_back(t);
            trips.emplace_back(t.col(), t.row(), t.value());
        }

    StiffnessForm form;
    form.matrix.resize(static_cast<int>(n), static_cast<int>(n));
    form.matrix.setFromTriplets(trips.begin(), trips.end());
    form.matrix.makeCompressed();
    form.delta_sing = delta_sing;
    form.grid = std::move(grid);
    return form;
}

Field apply_operator(const Grid& grid, const KernelSpec& kernel, const Field& u,
                     double delta_sing) {
    if (u.size() != grid.node_count())
        throw UsageError("apply_operator: field length mismatch");
    const Eigen::Index n = grid.node_count();
    const Eigen::Index ni = grid.interior_count();
    const double cut4 = std::pow(std::max(delta_sing, 0.0), 4);
    Field out = Field::Zero(n);
    for (Eigen::Index i = 0; i < ni; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double n4 = grid.rel_knorm4(i, j);
            if (n4 == 0.0) throw SingularityError("apply_operator: coincident nodes");
            if (n4 < cut4) continue;
            acc += (u(j) - u(i)) * kernel.eval_knorm4(n4) * grid.volume(j);
        }
        out(i) = acc;
    }
    return out;
}

double bilinear(const StiffnessForm& form, const Field& u, const Field& v) {
    if (u.size() != form.size() || v.size() != form.size())
        throw UsageError("bilinear: field length mismatch");
    return v.dot(form.matrix * u);
}

void require_z0(const Grid& grid, const Field& u, const char* who) {
    if (u.size() != grid.node_count())
        throw UsageError(std::string(who) + ": field length mismatch");
    for (Eigen::Index i = grid.interior_count(); i < grid.node_count(); ++i)
        if (u(i) != 0.0)
            throw UsageError(std::string(who) + ": field has nonzero exterior trace");
}

double z0_norm(const StiffnessForm& form, const Field& u) {
    if (!form.grid) throw UsageError("z0_norm: form has no grid");
    require_z0(*form.grid, u, "z0_norm");
    return std::sqrt(std::max(0.0, bilinear(form, u, u)));
}

double gagliardo_seminorm(const Grid& grid, const Field& u, double s, double delta_sing) {
    if (!(s > 0.0 && s < 1.0)) throw UsageError("gagliardo_seminorm: s must lie in (0,1)");
    require_z0(grid, u, "gagliardo_seminorm");
    const double e4 = 0.25 * (homogeneous_dim(grid.dim()) + 2.0 * s);
    Compensated acc;
    for_each_pair(grid, delta_sing, [&](Eigen::Index i, Eigen::Index j, double n4) {
        const double du = u(i) - u(j);
        acc.add(2.0 * du * du * std::pow(n4, -e4) * grid.volume(i) * grid.volume(j));
    });
    return std::sqrt(std::max(0.0, acc.value()));
}

double lq_norm(const Grid& grid, const Field& u, double q) {
    if (!(q >= 1.0)) throw UsageError("lq_norm: q must be >= 1");
    if (u.size() != grid.node_count()) throw UsageError("lq_norm: field length mismatch");
    Compensated acc;
    for (Eigen::Index i = 0; i < grid.interior_count(); ++i)
        acc.add(std::pow(std::abs(u(i)), q) * grid.volume(i));
    return std::pow(acc.value(), 1.0 / q);
}

double duality_residual(const Grid& grid, const KernelSpec& kernel, const Field& u,
                        const Field& v, double delta_sing) {
    if (u.size() != grid.node_count() || v.size() != grid.node_count())
        throw UsageError("duality_residual: field length mismatch");
    require_z0(grid, v, "duality_residual");

    // Left side: ordered double sum over S, one term per unordered pair.
    Compensated lhs;
    for_each_pair(grid, delta_sing, [&](Eigen::Index i, Eigen::Index j, double n4) {
        const double k = kernel.eval_knorm4(n4);
        lhs.add(2.0 * (u(i) - u(j)) * (v(i) - v(j)) * k * grid.volume(i) * grid.volume(j));
    });

    // Right side: inner second-difference sums per node, then paired with u.
    // The xi-tilde and xi-tilde^{-1} halves re-index onto the same retained
    // pairs because the kernel is symmetric.
    Eigen::VectorXd inner = Eigen::VectorXd::Zero(grid.node_count());
    for_each_pair(grid, delta_sing, [&](Eigen::Index i, Eigen::Index j, double n4) {
        const double k = kernel.eval_knorm4(n4);
        inner(i) += 2.0 * (v(i) - v(j)) * k * grid.volume(j);
        inner(j) += 2.0 * (v(j) - v(i)) * k * grid.volume(i);
    });
    Compensated rhs;
    for (Eigen::Index i = 0; i < grid.node_count(); ++i)
        rhs.add(u(i) * inner(i) * grid.volume(i));

    return std::abs(lhs.value() - rhs.value());
}

}  // namespace hvar
