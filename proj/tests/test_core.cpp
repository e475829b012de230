#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>

#include "roughw/common.hpp"
#include "roughw/grid.hpp"

using namespace roughw;

TEST_CASE("uniform grid endpoints and spacing") {
    const auto g = TimeGrid::uniform(8, 2.0);
    CHECK(g.n_steps() == 8);
    CHECK(g.n_points() == 9);
    CHECK(g.time(0) == 0.0);
    CHECK(g.horizon() == 2.0);
    CHECK(g.dt(2, 5) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("grid rejects malformed input") {
    CHECK_THROWS_AS(TimeGrid(Vec::Zero(1)), argument_error);
    Vec bad(3);
    bad << 0.0, 0.5, 0.5;
    CHECK_THROWS_AS(TimeGrid{bad}, argument_error);
    Vec shifted(3);
    shifted << 0.1, 0.5, 1.0;
    CHECK_THROWS_AS(TimeGrid{shifted}, argument_error);
    CHECK_THROWS_AS(TimeGrid::uniform(0, 1.0), argument_error);
    CHECK_THROWS_AS(TimeGrid::uniform(4, -1.0), argument_error);
}

TEST_CASE("stride restriction keeps every k-th time") {
    const auto g = TimeGrid::uniform(12, 3.0);
    const auto h = g.restrict_stride(4);
    CHECK(h.n_steps() == 3);
    for (std::size_t i = 0; i <= 3; ++i) CHECK(h.time(i) == g.time(4 * i));
    CHECK_THROWS_AS(g.restrict_stride(5), argument_error);
    CHECK(g.restrict_stride(1).same_as(g));
}

TEST_CASE("index bounds are enforced") {
    const auto g = TimeGrid::uniform(4, 1.0);
    CHECK_THROWS_AS(g.time(5), argument_error);
}

TEST_CASE("alpha range gate") {
    CHECK_NOTHROW(require_alpha(0.4));
    CHECK_NOTHROW(require_alpha(0.5));
    CHECK_THROWS_AS(require_alpha(1.0 / 3.0), argument_error);
    CHECK_THROWS_AS(require_alpha(0.51), argument_error);
}

TEST_CASE("log-log slope recovers an exact power law") {
    std::vector<double> x{1.0, 0.5, 0.25, 0.125};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v * std::sqrt(v));
    CHECK(loglog_slope(x, y) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), argument_error);
    CHECK_THROWS_AS(loglog_slope({1.0, -2.0}, {1.0, 1.0}), argument_error);
    CHECK_THROWS_AS(loglog_slope({1.0, 1.0}, {1.0, 2.0}), argument_error);
}

TEST_CASE("ladder fit passes inside the window and fails outside") {
    std::vector<double> mesh{1.0, 0.5, 0.25, 0.125};
    std::vector<double> res;
    for (double m : mesh) res.push_back(0.7 * m * m);

    auto r = fit_ladder("demo", 0.45, mesh, res, 1.0, 2.0, 0.3);
    CHECK(r.pass);
    CHECK_FALSE(r.exact);
    CHECK(r.slope == doctest::Approx(2.0).epsilon(1e-12));

    auto miss = fit_ladder("demo", 0.45, mesh, res, 1.0, 1.0, 0.3);
    CHECK_FALSE(miss.pass);
}

TEST_CASE("one-sided ladder fit accepts any faster order") {
    std::vector<double> mesh{1.0, 0.5, 0.25, 0.125};
    std::vector<double> decay, growth;
    for (double m : mesh) {
        decay.push_back(0.3 * m * m);  // slope +2 in mesh, i.e. fast decay
        growth.push_back(0.3 * m);
    }
    // positive target: steeper growth with interval length is better
    CHECK(fit_ladder("d", 0.45, mesh, decay, 1.0, 1.5, 0.3, true).pass);
    CHECK_FALSE(fit_ladder("d", 0.45, mesh, growth, 1.0, 1.5, 0.3, true).pass);
    // negative target: residuals shrinking faster than the target still pass
    std::vector<double> n_mesh{256, 512, 1024, 2048};
    std::vector<double> fast, slow;
    for (double n : n_mesh) {
        fast.push_back(10.0 / (n * n));
        slow.push_back(10.0 / std::pow(n, 0.1));
    }
    CHECK(fit_ladder("d", 0.45, n_mesh, fast, 1.0, -0.5, 0.3, true).pass);
    CHECK_FALSE(fit_ladder("d", 0.45, n_mesh, slow, 1.0, -0.5, 0.3, true).pass);
}

TEST_CASE("ladder fit reports floating-point-exact residuals") {
    std::vector<double> mesh{1.0, 0.5, 0.25};
    std::vector<double> res{1e-16, 3e-15, 2e-16};
    auto r = fit_ladder("exact", 0.45, mesh, res, 1.0, -0.5, 0.3);
    CHECK(r.exact);
    CHECK(r.pass);
}

TEST_CASE("parallel loop covers every index once") {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h = 0;
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h == 1);
}

TEST_CASE("parallel loop propagates worker exceptions") {
    CHECK_THROWS_AS(parallel_for(64,
                                 [&](std::size_t i) {
                                     if (i == 40) throw argument_error("worker failure");
                                 }),
                    argument_error);
}

TEST_CASE("divergence error names the step") {
    divergence_error e("blew up", 17);
    CHECK(e.step_index == 17);
}
