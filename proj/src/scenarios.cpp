#include "roughw/scenarios.hpp"

#include "roughw/controlled.hpp"

#include <algorithm>
#include <cmath>

namespace roughw::scenarios {

namespace {

Eigen::Index ei(std::size_t v) { return static_cast<Eigen::Index>(v); }

Vec direction_weights(std::size_t d) {
    Vec c(ei(d));
    for (std::size_t j = 0; j < d; ++j) c[ei(j)] = 1.0 / static_cast<double>(1 + j);
    return c;
}

}  // namespace

lifts::LiftSpec named_lift_spec(const std::string& name, std::size_t dim, std::size_t n,
                                std::uint64_t seed, double alpha, double horizon) {
    lifts::LiftSpec spec;
    spec.dim = dim;
    spec.n = n;
    spec.seed = seed;
    spec.alpha = alpha;
    spec.horizon = horizon;
    if (name == "pwl-circle") {
        spec.kind = lifts::LiftKind::piecewise_linear;
        spec.sample = "circle";
        spec.dim = std::max<std::size_t>(dim, 2);
    } else if (name == "pwl-line") {
        spec.kind = lifts::LiftKind::piecewise_linear;
        spec.sample = "line";
    } else if (name == "smooth-tt2") {
        spec.kind = lifts::LiftKind::smooth;
        spec.sample = "tt2";
        spec.dim = std::max<std::size_t>(dim, 2);
    } else if (name == "pure-area") {
        spec.kind = lifts::LiftKind::pure_area;
        spec.dim = std::max<std::size_t>(dim, 2);
        Mat a = Mat::Zero(ei(spec.dim), ei(spec.dim));
        a(0, 1) = 0.5;
        a(1, 0) = -0.5;
        spec.area = a;
    } else if (name == "brownian" || name == "brownian-ito" || name == "brownian-geo") {
        spec.kind = lifts::LiftKind::brownian_ito;
    } else {
        throw argument_error("unknown driver preset '" + name + "'");
    }
    return spec;
}

RoughPath named_driver(const std::string& name, std::size_t dim, std::size_t n,
                       std::uint64_t seed, double alpha, double horizon) {
    const auto spec = named_lift_spec(name, dim, n, seed, alpha, horizon);
    RoughPath p = lifts::make_lift(spec);
    if (name == "brownian-geo") return geometrize(p);
    return p;
}

std::vector<std::string> driver_names() {
    return {"pwl-circle", "pwl-line", "smooth-tt2", "pure-area", "brownian", "brownian-geo"};
}

namespace {

wentzell::FieldFamily zero_fields(std::size_t d) {
    wentzell::FieldFamily fields;
    fields.driver_dim = d;
    fields.h = [d](std::size_t, double) { return Vec::Zero(ei(d)); };
    fields.dxh = [d](std::size_t, double) { return Mat::Zero(ei(d), ei(d)); };
    fields.Dh = [d](std::size_t, double) { return Vec::Zero(ei(d)); };
    fields.dxDh = [d](std::size_t, double) { return Mat::Zero(ei(d), ei(d)); };
    return fields;
}

// h(t, x) = x in every driver direction, constant in t
wentzell::FieldFamily linear_fields(std::size_t d) {
    wentzell::FieldFamily fields;
    fields.driver_dim = d;
    fields.h = [d](std::size_t, double x) { return Vec::Constant(ei(d), x); };
    fields.dxh = [d](std::size_t, double) { return Mat::Zero(ei(d), ei(d)); };
    fields.Dh = [d](std::size_t, double) { return Vec::Ones(ei(d)); };
    fields.dxDh = [d](std::size_t, double) { return Mat::Zero(ei(d), ei(d)); };
    return fields;
}

// h(t, x) = sin(x) * c with c_j = 1/(1+j), constant in t
wentzell::FieldFamily sin_fields(std::size_t d) {
    const Vec c = direction_weights(d);
    wentzell::FieldFamily fields;
    fields.driver_dim = d;
    fields.h = [c, d](std::size_t, double x) { return Vec(std::sin(x) * c); };
    fields.dxh = [d](std::size_t, double) { return Mat::Zero(ei(d), ei(d)); };
    fields.Dh = [c, d](std::size_t, double x) { return Vec(std::cos(x) * c); };
    fields.dxDh = [d](std::size_t, double) { return Mat::Zero(ei(d), ei(d)); };
    return fields;
}

// running weighted driver value s_i = sum_j c_j (X^j_{t_i} - X^j_0)
std::vector<double> weighted_path(const RoughPath& p, const Vec& c) {
    std::vector<double> s(p.n_steps() + 1);
    for (std::size_t i = 0; i <= p.n_steps(); ++i)
        s[i] = (p.values().row(ei(i)) - p.values().row(0)).transpose().dot(c);
    return s;
}

ControlledPath sin_state(const RoughPath& p) {
    const std::size_t n = p.n_steps(), d = p.dim();
    Mat values(ei(n + 1), 1);
    std::vector<Mat> gub(n + 1, Mat::Zero(1, ei(d)));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x1 = p.values()(ei(i), 0);
        values(ei(i), 0) = std::sin(x1);
        gub[i](0, 0) = std::cos(x1);
    }
    return ControlledPath(p, values, gub);
}

}  // namespace

WentzellScenario make_wentzell_scenario(const std::string& name, const RoughPath& p) {
    const std::size_t d = p.dim();
    WentzellScenario s;
    s.name = name;
    if (name == "h_zero_quadratic") {
        s.fields = zero_fields(d);
        wentzell::GFieldInput input;
        input.g0 = [](double x) { return x * x; };
        input.g = [](std::size_t, double x) { return x * x; };
        input.Dg0 = [](double x) { return 2.0 * x; };
        input.Dg = [](std::size_t, double x) { return 2.0 * x; };
        input.D2g = [](std::size_t, double) { return 2.0; };
        s.g = wentzell::build_g(s.fields, input, p, {0.0});
        s.z = coordinate_lift(p, 0);
    } else if (name == "h_linear") {
        s.fields = linear_fields(d);
        const auto run = weighted_path(p, Vec::Ones(ei(d)));
        wentzell::GFieldInput input;
        input.g0 = [](double) { return 0.0; };
        input.g = [run](std::size_t i, double x) { return x * run[i]; };
        input.Dg0 = [](double) { return 0.0; };
        input.Dg = [run](std::size_t i, double) { return run[i]; };
        input.D2g = [](std::size_t, double) { return 0.0; };
        s.g = wentzell::build_g(s.fields, input, p, {0.0});
        s.z = coordinate_lift(p, 0);
    } else if (name == "h_sin" || name == "kz_drift") {
        s.fields = sin_fields(d);
        const auto run = weighted_path(p, direction_weights(d));
        wentzell::GFieldInput input;
        input.g0 = [](double x) { return x * x; };
        input.g = [run](std::size_t i, double x) { return x * x + std::sin(x) * run[i]; };
        input.Dg0 = [](double x) { return 2.0 * x; };
        input.Dg = [run](std::size_t i, double x) { return 2.0 * x + std::cos(x) * run[i]; };
        input.D2g = [run](std::size_t i, double x) { return 2.0 - std::sin(x) * run[i]; };
        s.g = wentzell::build_g(s.fields, input, p, {0.0});
        if (name == "kz_drift") {
            s.use_substitution = true;
            s.z0 = 0.25;
            const std::size_t n = p.n_steps();
            Mat ones = Mat::Ones(ei(n + 1), ei(d));
            std::vector<Mat> gub(n + 1, Mat::Zero(ei(d), ei(d)));
            s.a.emplace(p, ones, gub);
            s.b.assign(n + 1, Mat(0.3 * Mat::Identity(ei(d), ei(d))));
        } else {
            s.z = sin_state(p);
        }
    } else {
        throw argument_error("unknown verification scenario '" + name + "'");
    }
    return s;
}

std::vector<std::string> wentzell_scenario_names() {
    return {"h_zero_quadratic", "h_linear", "h_sin", "kz_drift"};
}

wentzell::WentzellReport run_wentzell_scenario(const WentzellScenario& scenario,
                                               const RoughPath& p) {
    if (scenario.use_substitution) {
        require(scenario.a.has_value(), "substitution scenario is missing its state data");
        return wentzell::keller_zhang_residual(scenario.fields, scenario.g, *scenario.a,
                                               scenario.b, scenario.z0, p);
    }
    require(scenario.z.has_value(), "scenario is missing its state path");
    return wentzell::wentzell_residual(scenario.fields, scenario.g, *scenario.z, p);
}

ScenarioLadder wentzell_scenario_ladder(const std::string& name, const RoughPath& master,
                                        std::size_t levels) {
    require(levels >= 1 && levels <= 6, "ladder depth must lie in [1, 6]");
    std::size_t stride = 1;
    for (std::size_t l = 1; l < levels; ++l) stride *= 2;
    require(master.n_steps() % stride == 0, "step count does not divide into the ladder");

    ScenarioLadder out;
    std::vector<double> mesh, residual;
    double scale = 1.0;
    for (std::size_t l = 0; l < levels; ++l, stride /= 2) {
        const RoughPath q = restrict_stride(master, stride);
        const auto scenario = make_wentzell_scenario(name, q);
        auto report = run_wentzell_scenario(scenario, q);
        mesh.push_back(static_cast<double>(q.n_steps()));
        residual.push_back(report.residual_max);
        scale = report.scale;
        out.reports.push_back(std::move(report));
    }
    out.ladder = fit_ladder("wentzell-" + name, master.alpha(), mesh, residual, scale,
                            -(3.0 * master.alpha() - 1.0), 0.3, false, 1e-12);
    return out;
}

}  // namespace roughw::scenarios
