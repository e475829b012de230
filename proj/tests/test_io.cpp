#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "roughw/io.hpp"
#include "roughw/scenarios.hpp"

using namespace roughw;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("io_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rough paths survive a file round trip bit for bit") {
    const auto p = scenarios::named_driver("brownian", 2, 64, 7, 0.45);
    TempFile f("path.json");
    io::save_rough_path(p, f.path);
    const auto q = io::load_rough_path(f.path);
    CHECK(q.alpha() == p.alpha());
    CHECK(q.grid().times() == p.grid().times());
    CHECK(q.values() == p.values());
    for (std::size_t i = 0; i <= 64; ++i) CHECK(q.cum2()[i] == p.cum2()[i]);
}

TEST_CASE("malformed path files are rejected with a clear error") {
    TempFile f("bad.json");
    {
        std::ofstream out(f.path);
        out << "{\"alpha\": 0.45, \"dim\": 2}";
    }
    CHECK_THROWS_AS(io::load_rough_path(f.path), argument_error);
    CHECK_THROWS_AS(io::load_json("does_not_exist.json"), argument_error);
    {
        std::ofstream out(f.path);
        out << "not json at all {";
    }
    CHECK_THROWS_AS(io::load_json(f.path), argument_error);
}

TEST_CASE("controlled paths round trip against their driver") {
    const auto p = scenarios::named_driver("brownian", 2, 32, 9, 0.45);
    const auto y = canonical_lift(p);
    const auto j = io::controlled_path_to_json(y);
    const auto back = io::controlled_path_from_json(j, p);
    CHECK(back.values() == y.values());
    for (std::size_t i = 0; i <= 32; ++i) CHECK(back.gubinelli()[i] == y.gubinelli()[i]);
    // wrong driver length is caught
    const auto small = scenarios::named_driver("brownian", 2, 16, 9, 0.45);
    CHECK_THROWS_AS(io::controlled_path_from_json(j, small), argument_error);
}

TEST_CASE("csv output keeps full float precision") {
    TempFile f("table.csv");
    Mat table(2, 2);
    table << 0.1 + 0.2, 1.0 / 3.0, -2.5e-17, 12345678.901234567;
    io::write_csv(f.path, {"left", "right"}, table);

    std::ifstream in(f.path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "left,right");
    double a, b;
    char comma;
    in >> a >> comma >> b;
    CHECK(a == 0.1 + 0.2);
    CHECK(b == 1.0 / 3.0);
    in >> a >> comma >> b;
    CHECK(a == -2.5e-17);
    CHECK(b == 12345678.901234567);
}

TEST_CASE("float formatting round trips through parsing") {
    for (double v : {M_PI, 1e-300, -0.0, 123.456, 2.2250738585072014e-308})
        CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("config hashes identify runs, not files") {
    io::json a = {{"seed", 7}, {"alpha", 0.45}, {"out", "here.json"}};
    io::json b = {{"alpha", 0.45}, {"seed", 7}, {"out", "elsewhere.csv"}};
    io::json c = {{"alpha", 0.45}, {"seed", 8}};
    const auto ha = io::config_hash(a);
    CHECK(ha == io::config_hash(b));
    CHECK(ha != io::config_hash(c));
    CHECK(ha.size() == 16);
    for (char ch : ha) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
}

TEST_CASE("report serializers expose the fields consumers rely on") {
    std::vector<double> mesh{1.0, 0.5}, res{0.1, 0.05};
    const auto ladder = fit_ladder("demo", 0.45, mesh, res, 1.0, 1.0, 0.5);
    const auto j = io::convergence_to_json(ladder);
    CHECK(j.at("study") == "demo");
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("mesh").size() == 2);
    CHECK(j.at("slope").get<double>() == doctest::Approx(1.0));

    const auto p = scenarios::named_driver("brownian-ito", 2, 128, 3, 0.45);
    const auto s = scenarios::make_wentzell_scenario("h_zero_quadratic", p);
    const auto r = scenarios::run_wentzell_scenario(s, p);
    const auto jw = io::wentzell_report_to_json(r);
    CHECK(jw.at("n").get<std::size_t>() == 128);
    CHECK(jw.at("lhs").size() == 129);
    CHECK(jw.at("residual_max").get<double>() == r.residual_max);
}
