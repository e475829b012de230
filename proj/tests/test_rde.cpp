#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "roughw/rde.hpp"
#include "roughw/scenarios.hpp"

using namespace roughw;

namespace {

double exponent_sum(const RoughPath& p, std::size_t i) {
    return (p.values().row(i) - p.values().row(0)).sum();
}

}  // namespace

TEST_CASE("zero field leaves the state untouched") {
    const auto p = scenarios::named_driver("brownian", 2, 256, 1, 0.45);
    Vec y0(3);
    y0 << 1.0, -2.0, 0.5;
    const auto y = rde::solve_rde(rde::zero_field(3, 2), y0, p);
    for (std::size_t i = 0; i <= 256; i += 32) CHECK((y.value(i) - y0).norm() == 0.0);
}

TEST_CASE("constant field integrates to a linear image of the increment") {
    const auto p = scenarios::named_driver("brownian", 2, 256, 3, 0.45);
    Mat c(2, 2);
    c << 1.0, 0.5, -0.25, 2.0;
    Vec y0(2);
    y0 << 0.1, 0.2;
    const auto y = rde::solve_rde(rde::constant_field(c), y0, p);
    const double scale = 1.0 + p.sup_norm();
    for (std::size_t i = 0; i <= 256; i += 32)
        CHECK((y.value(i) - y0 - c * p.increment(0, i)).norm() <= 1e-13 * scale);
}

TEST_CASE("scalar growth equation tracks the exponential closed form") {
    // smooth weakly geometric drivers of both built-in shapes; halving the mesh
    // divides the endpoint error by about four
    const double lambda = 0.7;
    for (const char* name : {"pwl-line", "smooth-tt2"}) {
        const std::size_t d = 2;
        std::vector<double> errs;
        for (std::size_t n : {std::size_t(32), std::size_t(64), std::size_t(128)}) {
            const auto p = scenarios::named_driver(name, d, n, 0, 0.5);
            const auto y = rde::solve_rde(rde::linear_field(lambda, d), Vec::Ones(1), p);
            double worst = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                worst = std::max(worst,
                                 std::abs(y.value(i)[0] -
                                          std::exp(lambda * exponent_sum(p, i))));
            errs.push_back(worst);
        }
        for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
            const double ratio = errs[k] / errs[k + 1];
            CHECK_MESSAGE(ratio > 1.5, name, " ratio ", ratio);
            CHECK_MESSAGE(ratio < 4.5, name, " ratio ", ratio);
        }
    }
}

TEST_CASE("analytic jacobians survive the difference cross-check") {
    const auto field = rde::linear_field(0.7, 2);
    CHECK(rde::validate_jacobian(field, 2.0, 32, 99) < 1e-9);
    rde::VectorField bent;
    bent.state_dim = 1;
    bent.driver_dim = 1;
    bent.f = [](const Vec& y) { return Mat(Mat::Constant(1, 1, std::sin(y[0]))); };
    bent.Df = [](const Vec& y) {
        return std::vector<Mat>{Mat(Mat::Constant(1, 1, std::cos(y[0])))};
    };
    CHECK(rde::validate_jacobian(bent, 2.0, 32, 99) < 1e-9);
    // a wrong jacobian is flagged
    bent.Df = [](const Vec&) { return std::vector<Mat>{Mat(Mat::Constant(1, 1, 2.0))}; };
    CHECK(rde::validate_jacobian(bent, 2.0, 32, 99) > 1e-2);
}

TEST_CASE("difference-filled jacobians solve as well as analytic ones") {
    const auto p = scenarios::named_driver("brownian-geo", 1, 512, 5, 0.5);
    auto analytic = rde::linear_field(0.9, 1);
    rde::VectorField bare;
    bare.state_dim = 1;
    bare.driver_dim = 1;
    bare.f = analytic.f;
    const auto filled = rde::with_fd_jacobian(bare);
    CHECK(filled.fd_jacobian);
    const auto ya = rde::solve_rde(analytic, Vec::Ones(1), p);
    const auto yn = rde::solve_rde(filled, Vec::Ones(1), p);
    CHECK((ya.values() - yn.values()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("a blowing-up field raises a divergence report with its step") {
    rde::VectorField e;
    e.state_dim = 1;
    e.driver_dim = 1;
    e.f = [](const Vec& y) { return Mat(Mat::Constant(1, 1, std::exp(y[0]))); };
    e.Df = [](const Vec& y) {
        return std::vector<Mat>{Mat(Mat::Constant(1, 1, std::exp(y[0])))};
    };
    const auto p = scenarios::named_driver("pwl-line", 1, 256, 0, 0.5);
    try {
        rde::solve_rde(e, Vec::Constant(1, 10.0), p);
        FAIL("expected a divergence report");
    } catch (const divergence_error& err) {
        CHECK(err.step_index <= 256);
    }
}

TEST_CASE("restarting mid-horizon continues the same trajectory") {
    const auto p = scenarios::named_driver("brownian-geo", 2, 512, 7, 0.5);
    const auto field = rde::linear_field(0.4, 2);
    const auto full = rde::solve_rde(field, Vec::Ones(1), p);
    const auto tail = subinterval(p, 256, 512);
    const auto resumed = rde::solve_rde(field, full.value(256), tail);
    const double scale = 1.0 + full.values().cwiseAbs().maxCoeff();
    CHECK(std::abs(resumed.value(256)[0] - full.value(512)[0]) <= 1e-10 * scale);
}

TEST_CASE("the flow solver exposes value and space derivatives") {
    const double lambda = 0.7;
    const auto p = scenarios::named_driver("brownian-geo", 1, 4096, 5, 0.5);
    Vec grid = Vec::LinSpaced(201, -1.0, 1.0);
    const auto flow = rde::solve_flow(rde::linear_field(lambda, 1), p, grid);
    double worst_y = 0.0, worst_dy = 0.0, worst_d2y = 0.0;
    for (std::size_t i = 0; i <= 4096; i += 512) {
        const double growth = std::exp(lambda * exponent_sum(p, i));
        for (double x : {-0.8, -0.1, 0.45}) {
            worst_y = std::max(worst_y, std::abs(flow.value(i, x) - x * growth));
            worst_dy = std::max(worst_dy, std::abs(flow.deriv(i, x) - growth));
            worst_d2y = std::max(worst_d2y, std::abs(flow.second(i, x)));
        }
    }
    CHECK(worst_y <= 1e-3);
    CHECK(worst_dy <= 1e-3);
    CHECK(worst_d2y <= 1e-2);
}

TEST_CASE("composition of two constant flows is exact") {
    const auto p = scenarios::named_driver("brownian-geo", 1, 256, 9, 0.5);
    const auto g = rde::constant_field(Mat::Constant(1, 1, 0.8));
    const auto f = rde::constant_field(Mat::Constant(1, 1, -0.3));
    const auto rep = rde::flow_composition_residual(g, f, p, 0.2);
    CHECK(rep.residual_max <= 1e-10 * rep.scale);
    CHECK(rep.residual_geometric_max <= 1e-10 * rep.scale);
}

TEST_CASE("composition residual decays at least at the advertised order") {
    const auto master = scenarios::named_driver("brownian-geo", 1, 1024, 11, 0.5);
    const auto g = rde::linear_field(-0.3, 1);
    const auto f = rde::linear_field(0.4, 1);
    const auto ladder = rde::flow_composition_ladder(g, f, master, 0.5, 4);
    CHECK(ladder.one_sided);
    CHECK_FALSE(ladder.exact);
    CHECK_MESSAGE(ladder.pass, "slope ", ladder.slope);
}

TEST_CASE("field constructors validate their shapes") {
    CHECK_THROWS_AS(rde::constant_field(Mat()), argument_error);
    const auto p = scenarios::named_driver("brownian", 2, 64, 1, 0.45);
    // driver dimension mismatch
    CHECK_THROWS_AS(rde::solve_rde(rde::linear_field(0.5, 3), Vec::Ones(1), p),
                    argument_error);
    // state dimension mismatch
    CHECK_THROWS_AS(rde::solve_rde(rde::linear_field(0.5, 2), Vec::Ones(2), p),
                    argument_error);
}
