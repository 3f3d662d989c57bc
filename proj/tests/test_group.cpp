#include <doctest.h>

#include <cmath>
#include <random>

#include "core/group.hpp"

using namespace hvar;

namespace {

GroupElement elem1(double x, double y, double t) {
    return GroupElement(Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, y), t);
}

GroupElement random_elem(int n, std::mt19937_64& rng, double span = 10.0) {
    std::uniform_real_distribution<double> unif(-span, span);
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) x(i) = unif(rng);
    for (int i = 0; i < n; ++i) y(i) = unif(rng);
    return GroupElement(x, y, unif(rng));
}

double max_diff(const GroupElement& a, const GroupElement& b) {
    return (a.coords() - b.coords()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("group law on hand-evaluated points") {
    // identity element
    CHECK(max_diff(multiply(GroupElement::zero(1), elem1(1, 2, 3)), elem1(1, 2, 3)) == 0.0);
    // (1,0,0)*(0,1,0) = (1,1,-2): twist t = 2(<x',y> - <x,y'>) = -2
    CHECK(max_diff(multiply(elem1(1, 0, 0), elem1(0, 1, 0)), elem1(1, 1, -2)) == 0.0);
    // inverse pair
    CHECK(max_diff(multiply(elem1(1, 0, 0), elem1(-1, 0, 0)), GroupElement::zero(1)) == 0.0);
}

TEST_CASE("group law rejects dimension mismatch") {
    const GroupElement a = GroupElement::zero(1);
    const GroupElement b = GroupElement::zero(2);
    CHECK_THROWS_AS(multiply(a, b), UsageError);
}

TEST_CASE("inverse") {
    CHECK(max_diff(inverse(GroupElement::zero(1)), GroupElement::zero(1)) == 0.0);
    CHECK(max_diff(inverse(elem1(1, 2, 3)), elem1(-1, -2, -3)) == 0.0);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const GroupElement a = random_elem(2, rng);
        CHECK(max_diff(inverse(inverse(a)), a) == 0.0);
        CHECK(max_diff(multiply(a, inverse(a)), GroupElement::zero(2)) <= 1e-14);
        CHECK(knorm(inverse(a)) == knorm(a));
    }
}

TEST_CASE("dilations") {
    const GroupElement a = elem1(1, 0, 1);
    CHECK(max_diff(dilate(1.0, a), a) == 0.0);
    CHECK(max_diff(dilate(2.0, a), elem1(2, 0, 4)) == 0.0);
    CHECK_THROWS_AS(dilate(0.0, a), UsageError);
    CHECK_THROWS_AS(dilate(-1.0, a), UsageError);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unif(0.1, 3.0);
    for (int k = 0; k < 100; ++k) {
        const GroupElement g = random_elem(1, rng);
        const double t1 = unif(rng), t2 = unif(rng);
        CHECK(max_diff(dilate(t1, dilate(t2, g)), dilate(t1 * t2, g)) <= 1e-12);
        CHECK(knorm(dilate(t1, g)) == doctest::Approx(t1 * knorm(g)).epsilon(1e-13));
    }
}

TEST_CASE("Koranyi norm") {
    CHECK(knorm(GroupElement::zero(1)) == 0.0);
    CHECK(knorm(elem1(3, 4, 0)) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(theta_weight(GroupElement::zero(1)) == 0.0);
    // knorm = 0.5 -> theta = 0.25
    const GroupElement half = dilate(0.5 / knorm(elem1(3, 4, 0)), elem1(3, 4, 0));
    CHECK(theta_weight(half) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(theta_weight(elem1(3, 4, 7)) == 1.0);
}

TEST_CASE("associativity over random triples") {
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const GroupElement a = random_elem(1, rng), b = random_elem(1, rng),
                           c = random_elem(1, rng);
        worst = std::max(worst,
                         max_diff(multiply(multiply(a, b), c), multiply(a, multiply(b, c))));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("left invariance of balls") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> unif(0.1, 5.0);
    for (int k = 0; k < 200; ++k) {
        const GroupElement xi = random_elem(1, rng), eta = random_elem(1, rng);
        const double r = unif(rng);
        const GroupElement zeta = multiply(inverse(xi), eta);
        // eta reconstructs as xi * zeta, and membership matches the norm test
        CHECK(max_diff(multiply(xi, zeta), eta) <= 1e-12);
        CHECK((knorm(zeta) < r) == (knorm(multiply(inverse(xi), eta)) < r));
    }
}

TEST_CASE("vector field stencils") {
    const GroupElement p = elem1(0.3, -0.7, 0.2);
    // constants differentiate to exactly zero
    CHECK(apply_vector_field({FieldKind::X, 1, 1e-3}, [](const GroupElement&) { return 4.2; },
                             p) == 0.0);
    // f = t: X_1 f = 2 y_1 (exact for linear functions)
    auto f_t = [](const GroupElement& q) { return q.t(); };
    CHECK(apply_vector_field({FieldKind::X, 1, 1e-3}, f_t, p) ==
          doctest::Approx(2.0 * p.y()(0)).epsilon(1e-12));
    CHECK(apply_vector_field({FieldKind::Y, 1, 1e-3}, f_t, p) ==
          doctest::Approx(-2.0 * p.x()(0)).epsilon(1e-12));
    CHECK_THROWS_AS(apply_vector_field({FieldKind::X, 1, 0.0}, f_t, p), UsageError);
    CHECK_THROWS_AS(apply_vector_field({FieldKind::X, 5, 1e-3}, f_t, p), UsageError);
}

TEST_CASE("commutator [X,Y] on f = t is exactly -4") {
    const GroupElement p = elem1(0.4, 0.9, -0.3);
    auto f = [](const GroupElement& q) { return q.t(); };
    const double h = 1e-3;
    auto xf = [&](const GroupElement& q) { return apply_vector_field({FieldKind::X, 1, h}, f, q); };
    auto yf = [&](const GroupElement& q) { return apply_vector_field({FieldKind::Y, 1, h}, f, q); };
    const double commutator = apply_vector_field({FieldKind::X, 1, h}, yf, p) -
                              apply_vector_field({FieldKind::Y, 1, h}, xf, p);
    CHECK(commutator == doctest::Approx(-4.0).epsilon(1e-10));
}

TEST_CASE("commutator convergence order on a smooth function") {
    auto f = [](const GroupElement& q) { return std::sin(q.x()(0)) * std::cos(q.t()); };
    auto dfdt = [](const GroupElement& q) { return -std::sin(q.x()(0)) * std::sin(q.t()); };
    const GroupElement p = elem1(0.35, -0.55, 0.4);
    std::vector<double> errs;
    for (double h : {4e-2, 2e-2, 1e-2}) {
        auto yf = [&](const GroupElement& q) {
            return apply_vector_field({FieldKind::Y, 1, h}, f, q);
        };
        auto xf = [&](const GroupElement& q) {
            return apply_vector_field({FieldKind::X, 1, h}, f, q);
        };
        const double got = apply_vector_field({FieldKind::X, 1, h}, yf, p) -
                           apply_vector_field({FieldKind::Y, 1, h}, xf, p);
        errs.push_back(std::abs(got - (-4.0) * dfdt(p)));
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}
