#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "roughw/integrate.hpp"
#include "roughw/scenarios.hpp"

using namespace roughw;

namespace {

// row integrand (X^a - X^a_0) e_b^T, whose compensated sums telescope to the
// accumulated level-2 tensor
RowControlledPath level2_integrand(const RoughPath& p, std::size_t a, std::size_t b) {
    const std::size_t n = p.n_steps(), d = p.dim();
    Mat values = Mat::Zero(n + 1, d);
    std::vector<Mat> gub(n + 1, Mat::Zero(d, d));
    for (std::size_t i = 0; i <= n; ++i) {
        values(i, b) = p.value(i)[a] - p.value(0)[a];
        gub[i](a, b) = 1.0;
    }
    return RowControlledPath(p, values, gub);
}

RowControlledPath constant_row(const RoughPath& p, const Vec& c) {
    const std::size_t n = p.n_steps(), d = p.dim();
    Mat values(n + 1, d);
    for (std::size_t i = 0; i <= n; ++i) values.row(i) = c.transpose();
    std::vector<Mat> gub(n + 1, Mat::Zero(d, d));
    return RowControlledPath(p, values, gub);
}

RowControlledPath sincos_row(const RoughPath& p) {
    const std::size_t n = p.n_steps();
    Mat values(n + 1, 2);
    std::vector<Mat> gub(n + 1, Mat::Zero(2, 2));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x1 = p.value(i)[0], x2 = p.value(i)[1];
        values(i, 0) = std::sin(x1);
        values(i, 1) = std::cos(x2);
        gub[i](0, 0) = std::cos(x1);
        gub[i](1, 1) = -std::sin(x2);
    }
    return RowControlledPath(p, values, gub);
}

}  // namespace

TEST_CASE("constant integrands reproduce the path increment exactly") {
    for (const char* name : {"brownian", "pwl-circle", "pure-area"}) {
        const auto p = scenarios::named_driver(name, 2, 512, 3, 0.45);
        Vec c(2);
        c << 1.0, -2.0;
        const auto r = integrate::rough_integral(constant_row(p, c));
        const double scale = 1.0 + p.sup_norm();
        for (std::size_t i = 0; i <= 512; i += 64)
            CHECK_MESSAGE(
                std::abs(r.path.value(i)[0] - c.dot(p.increment(0, i))) <= 1e-12 * scale, name);
    }
}

TEST_CASE("integrating the path against itself accumulates the level-2 tensor") {
    for (const char* name : {"brownian-ito", "brownian-geo", "smooth-tt2"}) {
        const auto p = scenarios::named_driver(name, 2, 1024, 7, 0.45);
        const double scale = 1.0 + p.sup_norm() * p.sup_norm();
        for (std::size_t a : {0, 1})
            for (std::size_t b : {0, 1}) {
                const auto r = integrate::rough_integral(level2_integrand(p, a, b));
                for (std::size_t i = 0; i <= 1024; i += 128) {
                    const double target = p.second_level(0, i)(a, b);
                    CHECK_MESSAGE(std::abs(r.path.value(i)[0] - target) <= 1e-12 * scale, name);
                }
            }
    }
}

TEST_CASE("block defect table is flat for the telescoping integrand") {
    const auto p = scenarios::named_driver("brownian", 2, 512, 9, 0.45);
    const auto r = integrate::rough_integral(level2_integrand(p, 0, 1));
    REQUIRE_FALSE(r.defects.empty());
    CHECK(r.defects.front().first == 2);
    CHECK(r.defects.back().first == 512);
    for (const auto& [block, defect] : r.defects) CHECK(defect < 1e-13);
}

TEST_CASE("block defects grow with block length for a genuine integrand") {
    const auto p = scenarios::named_driver("brownian", 2, 512, 9, 0.45);
    const auto r = integrate::rough_integral(sincos_row(p));
    CHECK(r.defects.back().second > 10.0 * r.defects.front().second);
}

TEST_CASE("compensated and plain accumulation agree") {
    const auto p = scenarios::named_driver("brownian", 2, 2048, 11, 0.45);
    const auto a = integrate::rough_integral(sincos_row(p), false);
    const auto b = integrate::rough_integral(sincos_row(p), true);
    const double scale = 1.0 + a.path.values().cwiseAbs().maxCoeff();
    CHECK((a.path.values() - b.path.values()).cwiseAbs().maxCoeff() < 1e-13 * scale);
}

TEST_CASE("integral result carries the integrand as its derivative") {
    const auto p = scenarios::named_driver("brownian", 2, 64, 1, 0.45);
    const auto y = sincos_row(p);
    const auto r = integrate::rough_integral(y);
    for (std::size_t i = 0; i <= 64; i += 16)
        CHECK((r.path.derivative(i) - y.values().row(i)).norm() == 0.0);
}

TEST_CASE("scalar-against-state integral matches the row formulation") {
    const auto p = scenarios::named_driver("brownian", 2, 512, 13, 0.45);
    // y = sin(X^1), z = X^1: both forms integrate the same germ
    const std::size_t n = p.n_steps();
    Mat yv(n + 1, 1);
    std::vector<Mat> ygub(n + 1, Mat::Zero(1, 2));
    Mat rv = Mat::Zero(n + 1, 2);
    std::vector<Mat> rgub(n + 1, Mat::Zero(2, 2));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x1 = p.value(i)[0];
        yv(i, 0) = std::sin(x1);
        ygub[i](0, 0) = std::cos(x1);
        rv(i, 0) = std::sin(x1);
        rgub[i](0, 0) = std::cos(x1);
    }
    const auto via_state =
        integrate::controlled_integral(ControlledPath(p, yv, ygub), coordinate_lift(p, 0));
    const auto via_row = integrate::rough_integral(RowControlledPath(p, rv, rgub));
    const double scale = 1.0 + via_row.path.values().cwiseAbs().maxCoeff();
    CHECK((via_state.path.values().col(0) - via_row.path.values().col(0)).cwiseAbs().maxCoeff() <
          1e-13 * scale);
}

TEST_CASE("bracket integral of a constant reads off the elapsed time") {
    const auto p = scenarios::named_driver("brownian-ito", 2, 256, 17, 0.45);
    Mat c(2, 2);
    c << 2.0, 5.0, -1.0, 3.0;  // trace 5
    const auto run = integrate::young_bracket_integral(std::vector<Mat>(257, c), p);
    for (std::size_t i = 0; i <= 256; i += 32)
        CHECK(run[i] == doctest::Approx(5.0 * p.grid().time(i)).epsilon(1e-13));
    // weakly geometric brackets vanish, so the same integral is zero
    const auto geo = scenarios::named_driver("brownian-geo", 2, 256, 17, 0.45);
    const auto zero = integrate::young_bracket_integral(std::vector<Mat>(257, c), geo);
    CHECK(zero.cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(integrate::young_bracket_integral(std::vector<Mat>(10, c), p),
                    argument_error);
}

TEST_CASE("left-endpoint bracket sums converge at first order") {
    // coeff t * I against the ito bracket integrates 2 t dt; halving the mesh
    // halves the left-endpoint error
    double errs[2];
    std::size_t idx = 0;
    for (std::size_t n : {std::size_t(128), std::size_t(256)}) {
        const auto p = scenarios::named_driver("brownian-ito", 2, n, 17, 0.45);
        std::vector<Mat> coeff(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            coeff[i] = p.grid().time(i) * Mat::Identity(2, 2);
        const auto run = integrate::young_bracket_integral(coeff, p);
        errs[idx++] = std::abs(run[n] - 1.0);
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("adding the bracket to the cells converts the two integral styles") {
    const auto p = scenarios::named_driver("brownian-ito", 2, 1024, 19, 0.45);
    const auto row = integrate::ito_strato_check_path(sincos_row(p));
    CHECK(row.residual_max <= 1e-13 * row.scale);

    const std::size_t n = p.n_steps();
    Mat yv(n + 1, 1);
    std::vector<Mat> ygub(n + 1, Mat::Zero(1, 2));
    for (std::size_t i = 0; i <= n; ++i) {
        yv(i, 0) = std::cos(p.value(i)[1]);
        ygub[i](0, 1) = -std::sin(p.value(i)[1]);
    }
    const auto ctrl = integrate::ito_strato_check_controlled(ControlledPath(p, yv, ygub),
                                                             coordinate_lift(p, 0));
    CHECK(ctrl.residual_max <= 1e-13 * ctrl.scale);
}

TEST_CASE("defect ladder reports the telescoping case as exact") {
    const auto fine = scenarios::named_driver("brownian", 2, 2048, 21, 0.5);
    const auto coarse = restrict_stride(fine, 32);
    const auto ladder = integrate::defect_ladder(level2_integrand(coarse, 0, 1),
                                                 level2_integrand(fine, 0, 1), 32, 0.5, 4);
    CHECK(ladder.exact);
    CHECK(ladder.pass);
}

TEST_CASE("local block defects decay at the compensated-sum order") {
    // reference mesh 64x finer; nonlinear integrand on a rough driver realizes
    // the advertised local order 3 alpha
    const auto fine = scenarios::named_driver("brownian", 2, 65536, 21, 0.5);
    const auto coarse = restrict_stride(fine, 64);
    const auto ladder =
        integrate::defect_ladder(sincos_row(coarse), sincos_row(fine), 64, 0.5, 5);
    CHECK_FALSE(ladder.exact);
    CHECK(ladder.target_slope == doctest::Approx(1.5));
    CHECK_MESSAGE(ladder.pass, "slope ", ladder.slope);
}

TEST_CASE("refinement mismatches are rejected") {
    const auto fine = scenarios::named_driver("brownian", 2, 1024, 3, 0.45);
    const auto coarse = restrict_stride(fine, 16);
    const auto stretched = scenarios::named_driver("brownian", 2, 1024, 3, 0.45, 2.0);
    CHECK_THROWS_AS(integrate::local_defect(sincos_row(coarse), sincos_row(stretched), 16, 0, 4),
                    argument_error);
    CHECK_THROWS_AS(integrate::defect_ladder(sincos_row(coarse), sincos_row(fine), 8, 0.45, 4),
                    argument_error);
}
