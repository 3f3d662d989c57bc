#include <doctest.h>

#include <cmath>

#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/kernel.hpp"

using namespace hvar;

namespace {

Eigen::VectorXd vec3(double x, double y, double t) {
    Eigen::VectorXd v(3);
    v << x, y, t;
    return v;
}

}  // namespace

TEST_CASE("unit box grid has the expected interior cells") {
    // Omega = [-1,1]^3, h = 1: interior cell centers at (+-1/2, +-1/2, +-1/2).
    const DomainSpec dom = DomainSpec::box(1, vec3(0, 0, 0), vec3(1, 1, 1));
    const Grid g = Grid::build(dom, 1.0, 4.0);
    CHECK(g.interior_count() == 8);
    for (Eigen::Index i = 0; i < g.interior_count(); ++i) {
        CHECK(std::abs(std::abs(g.coords()(i, 0)) - 0.5) < 1e-14);
        CHECK(std::abs(std::abs(g.coords()(i, 1)) - 0.5) < 1e-14);
        CHECK(std::abs(std::abs(g.coords()(i, 2)) - 0.5) < 1e-14);
    }
    CHECK(g.exterior_count() > 0);
    for (Eigen::Index i = g.interior_count(); i < g.node_count(); ++i)
        CHECK(knorm(g.node(i)) <= 4.0);
    // retained cell union measure
    CHECK(g.total_volume() ==
          doctest::Approx(double(g.node_count()) * 1.0).epsilon(1e-10));
}

TEST_CASE("halving h multiplies interior count by 8") {
    const DomainSpec dom = DomainSpec::box(1, vec3(0, 0, 0), vec3(1, 1, 1));
    const Grid coarse = Grid::build(dom, 1.0, 4.0);
    const Grid fine = Grid::build(dom, 0.5, 4.0);
    CHECK(fine.interior_count() == 8 * coarse.interior_count());
}

TEST_CASE("koranyi ball membership by norm") {
    const DomainSpec dom = DomainSpec::koranyi_ball(1, vec3(0, 0, 0), 1.0);
    // (0,0,0.99): knorm = 0.99^{1/2} ~ 0.995 < 1 -> interior
    CHECK(dom.contains(vec3(0, 0, 0.99)));
    CHECK_FALSE(dom.contains(vec3(0, 0, 1.01)));
    const Grid g = Grid::build(dom, 0.25, 4.0);
    CHECK(g.classify(GroupElement::from_coords(1, vec3(0, 0, 0.99))) == Region::Interior);
    CHECK(g.classify(GroupElement::from_coords(1, vec3(0, 0, 3.9 * 3.9))) ==
          Region::Exterior);
    CHECK(g.classify(GroupElement::from_coords(1, vec3(8, 0, 0))) ==
          Region::OutsideTruncation);
}

TEST_CASE("grid preconditions") {
    const DomainSpec dom = DomainSpec::box(1, vec3(0, 0, 0), vec3(1, 1, 1));
    // Omega not inside B_{R/2}
    CHECK_THROWS_AS(Grid::build(dom, 1.0, 2.0), UsageError);
    // h does not divide the extents
    CHECK_THROWS_AS(Grid::build(dom, 0.3, 4.0), UsageError);
    // node cap
    CHECK_THROWS_AS(Grid::build(dom, 0.25, 6.0, 0.0, 100), ResourceError);
}

TEST_CASE("interior volume converges to |Omega| at first order") {
    const DomainSpec dom = DomainSpec::koranyi_ball(1, vec3(0, 0, 0), 1.0);
    const double exact = dom.measure();
    CHECK(exact == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-13));
    const std::vector<double> hs{0.5, 0.25, 0.125};
    std::vector<double> errs;
    for (double h : hs) {
        const Grid g = Grid::build(dom, h, 2.0);
        errs.push_back(std::abs(g.interior_volume() - exact));
    }
    // O(h) boundary-cell error: bounded by C h (the count oscillates, so the
    // per-halving ratio is not monotone), and the finest grid beats the coarsest.
    for (std::size_t k = 0; k < hs.size(); ++k) CHECK(errs[k] <= 3.0 * hs[k]);
    CHECK(errs[2] < errs[0]);
}

TEST_CASE("dilation covariance of the node set") {
    const DomainSpec dom = DomainSpec::box(1, vec3(0, 0, 0), vec3(1, 1, 1));
    const double theta = 2.0;
    const DomainSpec dom2 = DomainSpec::box(
        1, vec3(0, 0, 0), vec3(theta * 1.0, theta * 1.0, theta * theta * 1.0));
    const Grid g1 = Grid::build(dom, 0.5, 4.0, 0.5);
    const Grid g2 = Grid::build(dom2, theta * 0.5, theta * 4.0, theta * theta * 0.5);
    REQUIRE(g1.node_count() == g2.node_count());
    REQUIRE(g1.interior_count() == g2.interior_count());
    // same lattice ordering on both sides, so nodes match up elementwise
    for (Eigen::Index i = 0; i < g1.node_count(); ++i) {
        const GroupElement mapped = dilate(theta, g1.node(i));
        CHECK((mapped.coords() - g2.node(i).coords()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("relative Koranyi norm matches group arithmetic") {
    const DomainSpec dom = DomainSpec::box(1, vec3(0.2, -0.1, 0.3), vec3(1, 1, 1));
    const Grid g = Grid::build(dom, 0.5, 6.0);
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(6, g.node_count()); ++i)
        for (Eigen::Index j = 0; j < std::min<Eigen::Index>(12, g.node_count()); ++j) {
            if (i == j) continue;
            const double via_group =
                knorm4(multiply(inverse(g.node(j)), g.node(i)));
            CHECK(g.rel_knorm4(i, j) == doctest::Approx(via_group).epsilon(1e-12));
        }
}

TEST_CASE("grid CSV round-trip preserves the node set") {
    const DomainSpec dom = DomainSpec::box(1, vec3(0, 0, 0), vec3(1, 1, 1));
    const Grid g = Grid::build(dom, 0.5, 4.0);
    const std::string path = "grid_roundtrip_test.csv";
    write_grid_csv(g, path);
    const Grid back = read_grid_csv(path);
    REQUIRE(back.node_count() == g.node_count());
    CHECK(back.interior_count() == g.interior_count());
    CHECK((back.coords() - g.coords()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.volumes() - g.volumes()).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("from_nodes rejects unordered labels") {
    Eigen::MatrixXd coords(2, 3);
    coords << 0, 0, 0, 1, 0, 0;
    Eigen::VectorXd vols = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(Grid::from_nodes(1, coords, vols,
                                     {NodeLabel::Exterior, NodeLabel::Interior}, 1.0, 4.0),
                    UsageError);
}

TEST_CASE("boundary-touching centers are exterior by the strict tie-break") {
    const DomainSpec dom = DomainSpec::box(1, vec3(0, 0, 0), vec3(1, 1, 1));
    CHECK_FALSE(dom.contains(vec3(1.0, 0, 0)));  // on the face: not interior
    CHECK(dom.contains(vec3(1.0 - 1e-12, 0, 0)));
    const Grid g = Grid::build(dom, 0.5, 4.0);
    CHECK(g.classify(GroupElement::from_coords(1, vec3(1.0, 0, 0))) == Region::Exterior);
}

TEST_CASE("grids build and assemble for N = 2") {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
    Eigen::VectorXd hw = Eigen::VectorXd::Constant(5, 0.5);
    const DomainSpec dom = DomainSpec::box(2, c, hw);
    auto grid = std::make_shared<Grid>(Grid::build(dom, 0.5, 2.2, 0.0, 100000));
    CHECK(grid->interior_count() == 32);
    CHECK(grid->dim() == 2);
    const KernelSpec kernel = KernelSpec::fractional(0.5, 2);  // Q = 6
    const StiffnessForm form = assemble_stiffness(grid, kernel, 0.25);
    // the operator annihilates constants exactly (term-by-term zero differences);
    // the assembled-matrix route cancels to round-off of the row sums
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid->node_count());
    CHECK(apply_operator(*grid, kernel, ones, 0.25).cwiseAbs().maxCoeff() == 0.0);
    const double diag_scale = Eigen::VectorXd(form.matrix.diagonal()).cwiseAbs().sum();
    CHECK(std::abs(bilinear(form, ones, ones)) <= 1e-12 * diag_scale);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(grid->node_count());
    u(0) = 1.0;
    CHECK(z0_norm(form, u) > 0.0);
}
