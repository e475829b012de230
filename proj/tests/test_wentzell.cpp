#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "roughw/scenarios.hpp"
#include "roughw/wentzell.hpp"

using namespace roughw;

namespace {

// h(t, x) = x in every driver direction, no explicit time dependence
wentzell::FieldFamily identity_rows(std::size_t d) {
    wentzell::FieldFamily f;
    f.driver_dim = d;
    f.h = [d](std::size_t, double x) { return Vec(Vec::Constant(d, x)); };
    f.dxh = [d](std::size_t, double) { return Mat(Mat::Zero(d, d)); };
    f.Dh = [d](std::size_t, double) { return Vec(Vec::Ones(d)); };
    f.dxDh = [d](std::size_t, double) { return Mat(Mat::Zero(d, d)); };
    return f;
}

double direction_sum(const RoughPath& p, std::size_t i) {
    return (p.values().row(i) - p.values().row(0)).sum();
}

}  // namespace

TEST_CASE("a pure initial field expands exactly") {
    const auto p = scenarios::named_driver("brownian-ito", 2, 1024, 3, 0.45);
    const auto s = scenarios::make_wentzell_scenario("h_zero_quadratic", p);
    const auto r = scenarios::run_wentzell_scenario(s, p);
    CHECK(r.residual_max <= 1e-12 * r.scale);
    CHECK(r.term_h.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.lhs[0] == r.term_initial[0]);
}

TEST_CASE("the linear family telescopes exactly") {
    const auto p = scenarios::named_driver("brownian", 2, 1024, 5, 0.45);
    const auto s = scenarios::make_wentzell_scenario("h_linear", p);
    const auto r = scenarios::run_wentzell_scenario(s, p);
    CHECK(r.residual_max <= 1e-12 * r.scale);
}

TEST_CASE("numeric field assembly agrees with the closed form") {
    const auto p = scenarios::named_driver("brownian", 2, 256, 9, 0.45);
    const auto fields = identity_rows(2);

    wentzell::GFieldInput analytic;
    analytic.g0 = [](double) { return 0.0; };
    analytic.g = [&p](std::size_t i, double x) { return x * direction_sum(p, i); };
    analytic.Dg0 = [](double) { return 0.0; };
    analytic.Dg = [&p](std::size_t i, double) { return direction_sum(p, i); };
    analytic.D2g = [](std::size_t, double) { return 0.0; };

    wentzell::GFieldInput numeric;
    numeric.g0 = [](double) { return 0.0; };
    numeric.Dg0 = [](double) { return 0.0; };

    const std::vector<double> points{0.0, 0.4, -1.1};
    const auto ga = wentzell::build_g(fields, analytic, p, points);
    const auto gn = wentzell::build_g(fields, numeric, p, points);
    CHECK(ga.analytic_dg);
    CHECK_FALSE(ga.fd_second);
    CHECK(gn.fd_second);

    const double scale = 1.0 + p.sup_norm();
    for (std::size_t i = 0; i <= 256; i += 64)
        for (double x : points) {
            CHECK(std::abs(gn.g(i, x) - ga.g(i, x)) <= 1e-12 * scale);
            CHECK(std::abs(gn.Dg(i, x) - ga.Dg(i, x)) <= 1e-12 * scale);
            CHECK(std::abs(gn.D2g(i, x)) <= 1e-6 * scale);
        }
}

TEST_CASE("the evolved field moves with the stated derivative rows") {
    const auto p = scenarios::named_driver("brownian", 2, 512, 11, 0.45);
    const auto fields = identity_rows(2);
    wentzell::GFieldInput input;
    input.g0 = [](double) { return 0.0; };
    input.g = [&p](std::size_t i, double x) { return x * direction_sum(p, i); };
    input.Dg0 = [](double) { return 0.0; };
    input.Dg = [&p](std::size_t i, double) { return direction_sum(p, i); };
    input.D2g = [](std::size_t, double) { return 0.0; };
    const auto g = wentzell::build_g(fields, input, p, {0.0});
    CHECK(wentzell::dg_consistency(fields, g, p, 0.3, 0.7) <= 1e-12 * (1.0 + p.sup_norm()));
}

TEST_CASE("residual ladder decays at the advertised order for the rough family") {
    const auto master = scenarios::named_driver("brownian", 2, 4096, 7, 0.48);
    const auto out = scenarios::wentzell_scenario_ladder("h_sin", master, 4);
    CHECK_FALSE(out.ladder.exact);
    CHECK(out.ladder.target_slope == doctest::Approx(-0.44).epsilon(1e-12));
    CHECK_MESSAGE(out.ladder.pass, "slope ", out.ladder.slope);
    // residual levels really shrink along the ladder
    CHECK(out.ladder.residual.front() > out.ladder.residual.back());
}

TEST_CASE("bracket terms vanish on a weakly geometric driver") {
    const auto p = scenarios::named_driver("brownian-geo", 2, 1024, 3, 0.45);
    const auto s = scenarios::make_wentzell_scenario("h_sin", p);
    const auto full = wentzell::wentzell_residual(s.fields, s.g, *s.z, p);
    const auto two = wentzell::wentzell_stratonovich(s.fields, s.g, *s.z, p);
    CHECK(full.term_dh_bracket.cwiseAbs().maxCoeff() <= 1e-12 * full.scale);
    CHECK(full.term_d2g_bracket.cwiseAbs().maxCoeff() <= 1e-12 * full.scale);
    CHECK(std::abs(full.residual_max - two.residual_max) <= 1e-12 * full.scale);

    const auto ito = scenarios::named_driver("brownian-ito", 2, 256, 3, 0.45);
    const auto si = scenarios::make_wentzell_scenario("h_sin", ito);
    CHECK_THROWS_AS(wentzell::wentzell_stratonovich(si.fields, si.g, *si.z, ito),
                    precondition_error);
}

TEST_CASE("the two expansion styles reconcile through the bracket correction") {
    const auto p = scenarios::named_driver("brownian-ito", 2, 1024, 13, 0.45);
    const auto s = scenarios::make_wentzell_scenario("h_sin", p);
    const auto check = wentzell::strato_reconciliation(s.fields, s.g, *s.z, p);
    CHECK(check.residual_max <= 1e-12 * check.scale);
}

TEST_CASE("substitution form with zero drift matches the direct expansion") {
    const auto p = scenarios::named_driver("brownian-ito", 2, 512, 15, 0.45);
    const auto s = scenarios::make_wentzell_scenario("h_sin", p);
    const std::size_t n = p.n_steps(), d = p.dim();
    const double z0 = 0.25;

    Mat ones = Mat::Ones(n + 1, d);
    std::vector<Mat> zero_gub(n + 1, Mat::Zero(d, d));
    RowControlledPath a(p, ones, zero_gub);
    const std::vector<Mat> b(n + 1, Mat(Mat::Zero(d, d)));
    const auto kz = wentzell::keller_zhang_residual(s.fields, s.g, a, b, z0, p);

    const auto run = integrate::rough_integral(a);
    const Mat zv = (run.path.values().array() + z0).matrix();
    std::vector<Mat> zgub(n + 1, Mat::Ones(1, d));
    const auto direct = wentzell::wentzell_residual(s.fields, s.g, ControlledPath(p, zv, zgub), p);

    CHECK((kz.lhs - direct.lhs).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(kz.residual_max - direct.residual_max) <= 1e-12 * direct.scale);
    CHECK(kz.residual_max <= 1e-12 * kz.scale + direct.residual_max);
}

TEST_CASE("substitution form with a genuine drift stays coherent") {
    const auto p = scenarios::named_driver("brownian-ito", 2, 2048, 17, 0.45);
    const auto s = scenarios::make_wentzell_scenario("kz_drift", p);
    REQUIRE(s.use_substitution);
    const auto r = scenarios::run_wentzell_scenario(s, p);
    CHECK(std::isfinite(r.residual_max));
    CHECK(r.residual_max > 0.0);
    CHECK(r.residual_max <= 0.1 * r.scale);
}

TEST_CASE("pairwise expansion defects decay at the local order") {
    const auto p = scenarios::named_driver("smooth-tt2", 2, 512, 0, 0.5);
    const auto s = scenarios::make_wentzell_scenario("h_sin", p);
    const auto sweep = wentzell::appendix_identity_checks(s.fields, s.g, *s.z, p, 5);
    CHECK_MESSAGE(sweep.a1.pass, "a1 slope ", sweep.a1.slope);
    CHECK_MESSAGE(sweep.a2.pass, "a2 slope ", sweep.a2.slope);
    CHECK(sweep.com_pass);
    CHECK(sweep.com_max <= 1e-10 * sweep.com_scale);
}

TEST_CASE("field families insist on complete data") {
    wentzell::FieldFamily incomplete;
    incomplete.driver_dim = 2;
    incomplete.h = [](std::size_t, double x) { return Vec(Vec::Constant(2, x)); };
    CHECK_THROWS_AS(incomplete.check_complete(), argument_error);
    CHECK_NOTHROW(identity_rows(2).check_complete());
}
