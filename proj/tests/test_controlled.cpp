#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "roughw/controlled.hpp"
#include "roughw/scenarios.hpp"

using namespace roughw;

TEST_CASE("canonical lift has identity derivative and zero remainder") {
    const auto p = scenarios::named_driver("brownian", 2, 256, 3, 0.45);
    const auto y = canonical_lift(p);
    CHECK(y.dim() == 2);
    CHECK((y.derivative(100) - Mat::Identity(2, 2)).norm() == 0.0);
    for (std::size_t i : {std::size_t(0), std::size_t(40), std::size_t(200)})
        CHECK(remainder(y, i, i + 37).norm() < 1e-15);
    const auto norms = controlled_norm(y, 0.45);
    CHECK(norms.remainder_2alpha < 1e-12);
}

TEST_CASE("coordinate lift selects one component") {
    const auto p = scenarios::named_driver("brownian", 3, 128, 5, 0.45);
    const auto y = coordinate_lift(p, 1);
    CHECK(y.dim() == 1);
    CHECK(y.value(77)[0] == p.value(77)[1]);
    CHECK(y.derivative(77)(0, 1) == 1.0);
    CHECK(y.derivative(77)(0, 0) == 0.0);
    CHECK(remainder(y, 10, 90).norm() < 1e-15);
    CHECK_THROWS_AS(coordinate_lift(p, 3), argument_error);
}

TEST_CASE("chain rule composition matches the analytic expansion") {
    const auto p = scenarios::named_driver("smooth-tt2", 2, 128, 0, 0.5);
    const auto z = canonical_lift(p);
    const auto f = time_independent_field(
        2, 2,
        [](const Vec& x) {
            Vec v(2);
            v << std::sin(x[0]), x[0] * x[1];
            return v;
        },
        [](const Vec& x) {
            Mat j(2, 2);
            j << std::cos(x[0]), 0.0, x[1], x[0];
            return j;
        });
    const auto y = compose_chain_rule(f, z);
    for (std::size_t i : {std::size_t(0), std::size_t(64), std::size_t(128)}) {
        const Vec x = p.value(i);
        CHECK(y.value(i)[0] == doctest::Approx(std::sin(x[0])).epsilon(1e-15));
        CHECK(y.value(i)[1] == doctest::Approx(x[0] * x[1]).epsilon(1e-15));
        // driver is its own state here, so the composed derivative is Df itself
        CHECK(y.derivative(i)(0, 0) == doctest::Approx(std::cos(x[0])).epsilon(1e-15));
        CHECK(y.derivative(i)(1, 0) == doctest::Approx(x[1]).epsilon(1e-15));
        CHECK(y.derivative(i)(1, 1) == doctest::Approx(x[0]).epsilon(1e-15));
    }
}

TEST_CASE("composed remainders shrink like a second-order term") {
    const auto p = scenarios::named_driver("brownian-geo", 1, 1024, 11, 0.5);
    const auto z = canonical_lift(p);
    const auto f = time_independent_field(
        1, 1,
        [](const Vec& x) {
            Vec v(1);
            v << std::sin(x[0]);
            return v;
        },
        [](const Vec& x) {
            Mat j(1, 1);
            j << std::cos(x[0]);
            return j;
        });
    const auto y = compose_chain_rule(f, z);
    for (std::size_t i = 0; i < 1024; i += 101) {
        const double dx = p.increment(i, i + 1)[0];
        // |sin(b) - sin(a) - cos(a)(b - a)| <= (b - a)^2 / 2
        CHECK(remainder(y, i, i + 1).norm() <= 0.5 * dx * dx + 1e-15);
    }
}

TEST_CASE("field wrapper falls back to difference jacobians") {
    const auto eval = [](const Vec& x) {
        Vec v(1);
        v << x[0] * x[0] + 2.0 * x[1];
        return v;
    };
    const auto analytic = time_independent_field(2, 1, eval, [](const Vec& x) {
        Mat j(1, 2);
        j << 2.0 * x[0], 2.0;
        return j;
    });
    const auto numeric = time_independent_field(2, 1, eval);
    CHECK_FALSE(analytic.fd_jacobian);
    CHECK(numeric.fd_jacobian);
    Vec x(2);
    x << 0.3, -0.2;
    CHECK(analytic.jacobian(0, x)(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK((numeric.jacobian(0, x) - analytic.jacobian(0, x)).norm() < 1e-8);
    // no explicit time rate means a zero gubinelli block of the driver shape
    const Mat g = analytic.gubinelli(0, x, 3);
    CHECK(g.rows() == 1);
    CHECK(g.cols() == 3);
    CHECK(g.norm() == 0.0);
}

TEST_CASE("controlled paths validate their shapes") {
    const auto p = scenarios::named_driver("brownian", 2, 32, 1, 0.45);
    Mat values = Mat::Zero(33, 1);
    std::vector<Mat> gub(33, Mat::Zero(1, 2));
    CHECK_NOTHROW(ControlledPath(p, values, gub));
    std::vector<Mat> short_gub(32, Mat::Zero(1, 2));
    CHECK_THROWS_AS(ControlledPath(p, values, short_gub), argument_error);
    std::vector<Mat> bad_shape(33, Mat::Zero(1, 3));
    CHECK_THROWS_AS(ControlledPath(p, values, bad_shape), argument_error);
    Mat bad_rows = Mat::Zero(32, 1);
    CHECK_THROWS_AS(ControlledPath(p, bad_rows, gub), argument_error);
}

TEST_CASE("row-valued controlled paths validate their shapes") {
    const auto p = scenarios::named_driver("brownian", 2, 32, 1, 0.45);
    Mat values = Mat::Zero(33, 2);
    std::vector<Mat> gub(33, Mat::Zero(2, 2));
    CHECK_NOTHROW(RowControlledPath(p, values, gub));
    std::vector<Mat> bad(33, Mat::Zero(2, 1));
    CHECK_THROWS_AS(RowControlledPath(p, values, bad), argument_error);
}
