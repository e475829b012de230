// Command-line front end: builds drivers, runs the verification studies, and
// writes deterministic json/csv artifacts for scripting.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "roughw/characteristics.hpp"
#include "roughw/io.hpp"
#include "roughw/scenarios.hpp"

using namespace roughw;
using io::json;

namespace {

struct DriverOpts {
    std::string driver = "brownian";
    std::size_t dim = 2;
    std::size_t n = 1024;
    double horizon = 1.0;
    std::uint64_t seed = 1;
    double alpha = 0.45;
    bool geometrize = false;
    std::string in;  // load a stored path instead of building a preset
};

struct OptRefs {
    CLI::App* cmd = nullptr;
    std::vector<std::pair<std::string, CLI::Option*>> tracked;
};

template <typename T>
void track(OptRefs& refs, const std::string& key, CLI::Option* opt, T*) {
    refs.tracked.emplace_back(key, opt);
}

OptRefs add_driver_opts(CLI::App* cmd, DriverOpts& o) {
    OptRefs refs;
    refs.cmd = cmd;
    refs.tracked.emplace_back("driver", cmd->add_option("--driver", o.driver,
                                                        "driver preset (see `list`)"));
    refs.tracked.emplace_back("dim", cmd->add_option("--dim", o.dim, "driver dimension"));
    refs.tracked.emplace_back("n", cmd->add_option("--n", o.n, "number of grid steps"));
    refs.tracked.emplace_back("horizon", cmd->add_option("--horizon", o.horizon, "final time"));
    refs.tracked.emplace_back("seed", cmd->add_option("--seed", o.seed, "generator seed"));
    refs.tracked.emplace_back("alpha", cmd->add_option("--alpha", o.alpha,
                                                       "regularity exponent in (1/3, 1/2]"));
    refs.tracked.emplace_back(
        "geometrize", cmd->add_flag("--geometrize", o.geometrize,
                                    "fold the bracket into the second level"));
    refs.tracked.emplace_back("in", cmd->add_option("--in", o.in, "load a stored path file"));
    return refs;
}

// --config supplies defaults for any option not set on the command line
void merge_config(const json& cfg, const OptRefs& refs, DriverOpts& o) {
    const auto fill = [&](const char* key, auto& slot) {
        for (const auto& [name, opt] : refs.tracked)
            if (name == key && opt->count() == 0 && cfg.contains(key))
                slot = cfg.at(key).get<std::decay_t<decltype(slot)>>();
    };
    fill("driver", o.driver);
    fill("dim", o.dim);
    fill("n", o.n);
    fill("horizon", o.horizon);
    fill("seed", o.seed);
    fill("alpha", o.alpha);
    fill("geometrize", o.geometrize);
    fill("in", o.in);
}

template <typename T>
void merge_one(const json& cfg, const char* key, const CLI::Option* opt, T& slot) {
    if (opt != nullptr && opt->count() == 0 && cfg.contains(key))
        slot = cfg.at(key).get<T>();
}

RoughPath build_driver(const DriverOpts& o) {
    RoughPath p = o.in.empty()
                      ? scenarios::named_driver(o.driver, o.dim, o.n, o.seed, o.alpha, o.horizon)
                      : io::load_rough_path(o.in);
    if (o.geometrize) return geometrize(p);
    return p;
}

json driver_config(const DriverOpts& o) {
    json cfg;
    cfg["driver"] = o.driver;
    cfg["dim"] = o.dim;
    cfg["n"] = o.n;
    cfg["horizon"] = o.horizon;
    cfg["seed"] = o.seed;
    cfg["alpha"] = o.alpha;
    cfg["geometrize"] = o.geometrize;
    if (!o.in.empty()) cfg["in"] = o.in;
    return cfg;
}

json make_meta(const std::string& command, const json& cfg) {
    json meta;
    meta["command"] = command;
    meta["config_hash"] = io::config_hash(cfg);
    if (cfg.contains("seed")) meta["seed"] = cfg.at("seed");
    return meta;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                 suffix) == 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

Vec parse_xgrid(const std::string& text) {
    const auto parts = split(text, ':');
    require(parts.size() == 3, "xgrid must look like lo:hi:count");
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const long count = std::stol(parts[2]);
    require(hi > lo && count >= 2, "xgrid needs hi > lo and count >= 2");
    return Vec::LinSpaced(count, lo, hi);
}

rde::VectorField parse_field(const std::string& text, std::size_t driver_dim) {
    if (text == "zero") return rde::zero_field(1, driver_dim);
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "const") {
        const double c = std::stod(parts[1]);
        return rde::constant_field(Mat::Constant(1, driver_dim, c));
    }
    if (parts.size() == 2 && parts[0] == "linear")
        return rde::linear_field(std::stod(parts[1]), driver_dim);
    throw argument_error("unknown field '" + text + "'; use zero, const:<c>, or linear:<rate>");
}

RowControlledPath row_integrand(const std::string& name, const RoughPath& p) {
    const std::size_t n = p.n_steps(), d = p.dim();
    Mat values(n + 1, d);
    std::vector<Mat> gub(n + 1, Mat::Zero(d, d));
    if (name == "canonical") {
        for (std::size_t i = 0; i <= n; ++i) {
            values.row(i) = p.values().row(i) - p.values().row(0);
            gub[i] = Mat::Identity(d, d);
        }
        return RowControlledPath(p, values, gub);
    }
    if (name == "square") {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t b = 0; b < d; ++b) {
                const double inc = p.value(i)[b] - p.value(0)[b];
                values(i, b) = inc * inc;
                gub[i](b, b) = 2.0 * inc;
            }
        return RowControlledPath(p, values, gub);
    }
    const auto parts = split(name, ':');
    if (parts.size() == 2 && parts[0] == "file") {
        const ControlledPath stored = io::controlled_path_from_json(io::load_json(parts[1]), p);
        require(stored.dim() == d, "stored integrand must have one component per direction");
        return RowControlledPath(p, stored.values(), stored.gubinelli());
    }
    throw argument_error("unknown integrand '" + name +
                         "'; use canonical, square, or file:<path>");
}

ControlledPath scalar_integrand(const std::string& name, const RoughPath& p) {
    const std::size_t n = p.n_steps(), d = p.dim();
    if (name == "canonical") return coordinate_lift(p, 0);
    if (name == "square") {
        Mat values(n + 1, 1);
        std::vector<Mat> gub(n + 1, Mat::Zero(1, d));
        for (std::size_t i = 0; i <= n; ++i) {
            const double inc = p.value(i)[0] - p.value(0)[0];
            values(i, 0) = inc * inc;
            gub[i](0, 0) = 2.0 * inc;
        }
        return ControlledPath(p, values, gub);
    }
    const auto parts = split(name, ':');
    if (parts.size() == 2 && parts[0] == "file") {
        const ControlledPath stored = io::controlled_path_from_json(io::load_json(parts[1]), p);
        require(stored.dim() == 1, "stored scalar integrand must have one component");
        return stored;
    }
    throw argument_error("unknown integrand '" + name +
                         "'; use canonical, square, or file:<path>");
}

characteristics::SemilinearSpec transport_spec(const std::string& name, std::size_t driver_dim) {
    if (name == "translate" || name == "linear")
        return characteristics::transport_scenario(name, driver_dim);
    // anything else is a json file with constant + linear coefficient rows
    const json j = io::load_json(name);
    characteristics::SemilinearSpec spec;
    spec.driver = driver_dim;
    std::vector<double> pc(driver_dim, 0.0), pl(driver_dim, 0.0);
    if (j.contains("p_const")) pc = j.at("p_const").get<std::vector<double>>();
    if (j.contains("p_linear")) pl = j.at("p_linear").get<std::vector<double>>();
    require(pc.size() == driver_dim && pl.size() == driver_dim,
            "coefficient arrays must have one entry per driver direction");
    for (std::size_t k = 0; k < driver_dim; ++k) {
        const double c0 = pc[k], c1 = pl[k];
        spec.P.push_back([c0, c1](const Vec& x) { return Vec(Vec::Constant(1, c0 + c1 * x[0])); });
        spec.DP.push_back([c1](const Vec&) { return Mat(Mat::Constant(1, 1, c1)); });
        spec.Q.push_back([](const Vec&, double) { return 0.0; });
        spec.Qx.push_back([](const Vec&, double) { return Vec(Vec::Zero(1)); });
        spec.Qu.push_back([](const Vec&, double) { return 0.0; });
    }
    const std::string phi = j.value("phi", std::string("square"));
    if (phi == "square") {
        spec.phi = [](const Vec& x) { return x[0] * x[0]; };
        spec.Dphi = [](const Vec& x) { return Vec(Vec::Constant(1, 2.0 * x[0])); };
    } else if (phi == "identity") {
        spec.phi = [](const Vec& x) { return x[0]; };
        spec.Dphi = [](const Vec&) { return Vec(Vec::Ones(1)); };
    } else {
        throw argument_error("unknown datum '" + phi + "'; use square or identity");
    }
    spec.x_lo = j.value("x_lo", -1.0);
    spec.x_hi = j.value("x_hi", 1.0);
    spec.grid_n = j.value("grid_n", std::size_t(200));
    return spec;
}

double worst_chen_triples(const RoughPath& p, std::size_t triples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, p.n_steps());
    double worst = 0.0;
    for (std::size_t t = 0; t < triples; ++t) {
        std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        worst = std::max(worst, p.chen_residual(a, b, c));
    }
    return worst;
}

void write_series_csv(const std::string& file, const RoughPath& p, const Mat& columns,
                      const std::vector<std::string>& names) {
    Mat table(columns.rows(), columns.cols() + 1);
    table.col(0) = p.grid().times();
    table.rightCols(columns.cols()) = columns;
    std::vector<std::string> header{"t"};
    header.insert(header.end(), names.begin(), names.end());
    io::write_csv(file, header, table);
}

int emit(const json& out, const std::string& file, const std::string& line) {
    if (!file.empty()) io::save_json(out, file);
    std::cout << line << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rough-path verification toolkit"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "json file with default option values");

    DriverOpts d_lift, d_chen, d_int, d_rde, d_wz, d_tr, d_conv;
    std::string out_lift, out_chen, out_int, out_rde, out_wz, out_tr, out_conv;

    auto* c_list = app.add_subcommand("list", "print driver presets and scenarios");

    auto* c_lift = app.add_subcommand("lift", "build a driver and store it");
    auto r_lift = add_driver_opts(c_lift, d_lift);
    auto* o_lift_out = c_lift->add_option("--out", out_lift, "output path file (json)");

    auto* c_chen = app.add_subcommand("verify-chen", "multiplicativity spot check");
    auto r_chen = add_driver_opts(c_chen, d_chen);
    std::size_t chen_triples = 2000;
    double chen_tol = 1e-10;
    auto* o_chen_triples = c_chen->add_option("--triples", chen_triples, "random triples");
    auto* o_chen_tol = c_chen->add_option("--tol", chen_tol, "tolerance scale");
    auto* o_chen_out = c_chen->add_option("--out", out_chen, "json report path");

    auto* c_int = app.add_subcommand("integrate", "compensated-sum integrals");
    auto r_int = add_driver_opts(c_int, d_int);
    std::string integrand = "canonical", kind = "rough";
    bool kahan = false;
    auto* o_int_integrand =
        c_int->add_option("--integrand", integrand, "canonical | square | file:<path>");
    auto* o_int_kind = c_int->add_option("--kind", kind, "rough | controlled | young");
    c_int->add_flag("--kahan", kahan, "compensated accumulator");
    auto* o_int_out = c_int->add_option("--out", out_int, "output path (.json or .csv)");

    auto* c_rde = app.add_subcommand("solve-rde", "controlled state equation");
    auto r_rde = add_driver_opts(c_rde, d_rde);
    std::string field_text = "linear:0.7";
    double y0 = 1.0;
    auto* o_rde_field =
        c_rde->add_option("--field", field_text, "zero | const:<c> | linear:<rate>");
    auto* o_rde_y0 = c_rde->add_option("--y0", y0, "initial state");
    auto* o_rde_out = c_rde->add_option("--out", out_rde, "output path (.json or .csv)");

    auto* c_wz = app.add_subcommand("verify-wentzell", "field-along-state expansion residual");
    auto r_wz = add_driver_opts(c_wz, d_wz);
    std::string wz_scenario = "h_sin";
    std::size_t wz_levels = 1;
    double wz_tol = 0.0;
    auto* o_wz_scenario = c_wz->add_option("--scenario", wz_scenario,
                                           "h_zero_quadratic | h_linear | h_sin | kz_drift");
    auto* o_wz_levels = c_wz->add_option("--mesh-ladder", wz_levels, "ladder depth (1 = single)");
    auto* o_wz_tol = c_wz->add_option("--tol", wz_tol, "absolute pass bound (x scale)");
    auto* o_wz_out = c_wz->add_option("--out", out_wz, "json report path");

    auto* c_tr = app.add_subcommand("solve-transport", "semilinear transport by characteristics");
    auto r_tr = add_driver_opts(c_tr, d_tr);
    std::string tr_scenario = "translate", tr_xgrid = "-0.5:0.5:11";
    std::optional<std::size_t> tr_t;
    auto* o_tr_scenario =
        c_tr->add_option("--scenario", tr_scenario, "translate | linear | <spec.json>");
    auto* o_tr_t = c_tr->add_option("--t", tr_t, "grid time index (default: final)");
    auto* o_tr_xgrid = c_tr->add_option("--xgrid", tr_xgrid, "evaluation points lo:hi:count");
    auto* o_tr_out = c_tr->add_option("--out", out_tr, "output path (.json or .csv)");

    auto* c_conv = app.add_subcommand("convergence", "mesh-refinement studies");
    auto r_conv = add_driver_opts(c_conv, d_conv);
    std::string study = "wentzell:h_sin";
    std::size_t levels = 4, stride = 16;
    double fc_g = -0.3, fc_f = 0.4, fc_x = 0.5;
    std::string conv_probes = "-0.25:0.3";
    auto* o_conv_study = c_conv->add_option(
        "--study", study,
        "defect | wentzell:<scenario> | flow-composition | transport-residual:<scenario>");
    auto* o_conv_levels = c_conv->add_option("--levels", levels, "ladder depth");
    auto* o_conv_stride = c_conv->add_option("--stride", stride, "reference refinement (defect)");
    auto* o_conv_g = c_conv->add_option("--rate-outer", fc_g, "outer flow rate (composition)");
    auto* o_conv_f = c_conv->add_option("--rate-inner", fc_f, "inner flow rate (composition)");
    auto* o_conv_x = c_conv->add_option("--x", fc_x, "start point (composition)");
    auto* o_conv_probes = c_conv->add_option("--probes", conv_probes,
                                             "colon-separated probe points (transport)");
    auto* o_conv_out = c_conv->add_option("--out", out_conv, "output path (.json)");

    // lets --config appear after the subcommand name as well as before it
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        json cfg_file;
        if (!config_file.empty()) cfg_file = io::load_json(config_file);

        if (c_list->parsed()) {
            std::cout << "drivers:";
            for (const auto& n : scenarios::driver_names()) std::cout << " " << n;
            std::cout << "\nscenarios:";
            for (const auto& n : scenarios::wentzell_scenario_names()) std::cout << " " << n;
            std::cout << "\ntransport: translate linear\n";
            return 0;
        }

        if (c_lift->parsed()) {
            merge_config(cfg_file, r_lift, d_lift);
            merge_one(cfg_file, "out", o_lift_out, out_lift);
            require(!out_lift.empty(), "lift needs --out");
            const RoughPath p = build_driver(d_lift);
            io::save_rough_path(p, out_lift);
            std::cout << "wrote " << out_lift << " (driver=" << d_lift.driver
                      << ", n=" << p.n_steps() << ", dim=" << p.dim() << ")\n";
            return 0;
        }

        if (c_chen->parsed()) {
            merge_config(cfg_file, r_chen, d_chen);
            merge_one(cfg_file, "triples", o_chen_triples, chen_triples);
            merge_one(cfg_file, "tol", o_chen_tol, chen_tol);
            merge_one(cfg_file, "out", o_chen_out, out_chen);
            const RoughPath p = build_driver(d_chen);
            const double worst = worst_chen_triples(p, chen_triples, d_chen.seed);
            const double bound = chen_tol * (1.0 + p.sup_norm() * p.sup_norm());
            const bool pass = worst <= bound;
            json cfg = driver_config(d_chen);
            cfg["triples"] = chen_triples;
            cfg["tol"] = chen_tol;
            json out;
            out["meta"] = make_meta("verify-chen", cfg);
            out["config"] = cfg;
            out["worst_residual"] = worst;
            out["bound"] = bound;
            out["pass"] = pass;
            emit(out, out_chen,
                 std::string(pass ? "PASS" : "FAIL") + " verify-chen worst=" +
                     io::format_double(worst) + " bound=" + io::format_double(bound));
            return pass ? 0 : 2;
        }

        if (c_int->parsed()) {
            merge_config(cfg_file, r_int, d_int);
            merge_one(cfg_file, "integrand", o_int_integrand, integrand);
            merge_one(cfg_file, "kind", o_int_kind, kind);
            merge_one(cfg_file, "out", o_int_out, out_int);
            const RoughPath p = build_driver(d_int);
            json cfg = driver_config(d_int);
            cfg["integrand"] = integrand;
            cfg["kind"] = kind;
            cfg["kahan"] = kahan;

            Mat columns;
            std::vector<std::string> names;
            json defects = json::array();
            if (kind == "rough") {
                const auto r = integrate::rough_integral(row_integrand(integrand, p), kahan);
                columns = r.path.values();
                names = {"integral"};
                for (const auto& [block, defect] : r.defects)
                    defects.push_back({{"block", block}, {"defect", defect}});
            } else if (kind == "controlled") {
                const auto r = integrate::controlled_integral(scalar_integrand(integrand, p),
                                                              canonical_lift(p), kahan);
                columns = r.path.values();
                for (std::size_t c = 0; c < p.dim(); ++c)
                    names.push_back("integral_" + std::to_string(c));
                for (const auto& [block, defect] : r.defects)
                    defects.push_back({{"block", block}, {"defect", defect}});
            } else if (kind == "young") {
                std::vector<Mat> coeff(p.n_steps() + 1);
                for (std::size_t i = 0; i <= p.n_steps(); ++i) {
                    if (integrand == "canonical")
                        coeff[i] = Mat::Identity(p.dim(), p.dim());
                    else if (integrand == "square") {
                        const Vec inc = p.value(i) - p.value(0);
                        coeff[i] = inc * inc.transpose();
                    } else {
                        throw argument_error("young integrals take canonical or square");
                    }
                }
                columns = integrate::young_bracket_integral(coeff, p);
                names = {"integral"};
            } else {
                throw argument_error("unknown kind '" + kind +
                                     "'; use rough, controlled, or young");
            }

            if (ends_with(out_int, ".csv")) {
                write_series_csv(out_int, p, columns, names);
                std::cout << "wrote " << out_int << "\n";
            } else {
                json out;
                out["meta"] = make_meta("integrate", cfg);
                out["config"] = cfg;
                out["times"] = std::vector<double>(p.grid().times().data(),
                                                   p.grid().times().data() + p.n_steps() + 1);
                json values = json::array();
                for (Eigen::Index r = 0; r < columns.rows(); ++r) {
                    json row = json::array();
                    for (Eigen::Index c = 0; c < columns.cols(); ++c) row.push_back(columns(r, c));
                    values.push_back(std::move(row));
                }
                out["values"] = std::move(values);
                if (!defects.empty()) out["defects"] = std::move(defects);
                emit(out, out_int,
                     "integrate " + kind + "/" + integrand + " final=" +
                         io::format_double(columns(columns.rows() - 1, 0)));
            }
            return 0;
        }

        if (c_rde->parsed()) {
            merge_config(cfg_file, r_rde, d_rde);
            merge_one(cfg_file, "field", o_rde_field, field_text);
            merge_one(cfg_file, "y0", o_rde_y0, y0);
            merge_one(cfg_file, "out", o_rde_out, out_rde);
            const RoughPath p = build_driver(d_rde);
            const auto field = parse_field(field_text, p.dim());
            const auto y = rde::solve_rde(field, Vec::Constant(1, y0), p);
            json cfg = driver_config(d_rde);
            cfg["field"] = field_text;
            cfg["y0"] = y0;
            if (ends_with(out_rde, ".csv")) {
                write_series_csv(out_rde, p, y.values(), {"y"});
                std::cout << "wrote " << out_rde << "\n";
            } else {
                json out;
                out["meta"] = make_meta("solve-rde", cfg);
                out["config"] = cfg;
                out["values"] = std::vector<double>(y.values().data(),
                                                    y.values().data() + p.n_steps() + 1);
                emit(out, out_rde,
                     "solve-rde " + field_text + " final=" +
                         io::format_double(y.value(p.n_steps())[0]));
            }
            return 0;
        }

        if (c_wz->parsed()) {
            merge_config(cfg_file, r_wz, d_wz);
            merge_one(cfg_file, "scenario", o_wz_scenario, wz_scenario);
            merge_one(cfg_file, "mesh-ladder", o_wz_levels, wz_levels);
            merge_one(cfg_file, "tol", o_wz_tol, wz_tol);
            merge_one(cfg_file, "out", o_wz_out, out_wz);
            const RoughPath p = build_driver(d_wz);
            json cfg = driver_config(d_wz);
            cfg["scenario"] = wz_scenario;
            cfg["mesh-ladder"] = wz_levels;
            cfg["tol"] = wz_tol;
            json out;
            out["meta"] = make_meta("verify-wentzell", cfg);
            out["config"] = cfg;
            bool pass = true;
            std::string line;
            if (wz_levels <= 1) {
                const auto scenario = scenarios::make_wentzell_scenario(wz_scenario, p);
                const auto report = scenarios::run_wentzell_scenario(scenario, p);
                out["report"] = io::wentzell_report_to_json(report);
                if (wz_tol > 0.0) pass = report.residual_max <= wz_tol * report.scale;
                line = std::string(pass ? "PASS" : "FAIL") + " verify-wentzell " + wz_scenario +
                       " residual=" + io::format_double(report.residual_max) +
                       " scale=" + io::format_double(report.scale);
            } else {
                const auto ladder = scenarios::wentzell_scenario_ladder(wz_scenario, p, wz_levels);
                out["ladder"] = io::convergence_to_json(ladder.ladder);
                json reports = json::array();
                for (const auto& r : ladder.reports)
                    reports.push_back(io::wentzell_report_to_json(r));
                out["reports"] = std::move(reports);
                pass = ladder.ladder.pass;
                line = std::string(pass ? "PASS" : "FAIL") + " verify-wentzell " + wz_scenario +
                       (ladder.ladder.exact
                            ? std::string(" exact")
                            : " slope=" + io::format_double(ladder.ladder.slope));
            }
            emit(out, out_wz, line);
            return pass ? 0 : 2;
        }

        if (c_tr->parsed()) {
            merge_config(cfg_file, r_tr, d_tr);
            merge_one(cfg_file, "scenario", o_tr_scenario, tr_scenario);
            merge_one(cfg_file, "xgrid", o_tr_xgrid, tr_xgrid);
            merge_one(cfg_file, "out", o_tr_out, out_tr);
            if (!tr_t && cfg_file.contains("t")) tr_t = cfg_file.at("t").get<std::size_t>();
            const RoughPath p = build_driver(d_tr);
            const auto spec = transport_spec(tr_scenario, p.dim());
            const std::size_t t_index = tr_t.value_or(p.n_steps());
            const Vec xs = parse_xgrid(tr_xgrid);
            const auto slice = characteristics::solve_semilinear(spec, p, t_index, xs);
            json cfg = driver_config(d_tr);
            cfg["scenario"] = tr_scenario;
            cfg["t"] = t_index;
            cfg["xgrid"] = tr_xgrid;
            if (ends_with(out_tr, ".csv")) {
                Mat table(xs.size(), 3);
                table.col(0) = xs;
                table.col(1) = slice.u;
                table.col(2) = slice.inversion_residual;
                io::write_csv(out_tr, {"x", "u", "inversion_residual"}, table);
                std::cout << "wrote " << out_tr << "\n";
            } else {
                json out;
                out["meta"] = make_meta("solve-transport", cfg);
                out["config"] = cfg;
                out["x"] = std::vector<double>(xs.data(), xs.data() + xs.size());
                out["u"] = std::vector<double>(slice.u.data(), slice.u.data() + slice.u.size());
                out["inversion_residual"] =
                    std::vector<double>(slice.inversion_residual.data(),
                                        slice.inversion_residual.data() +
                                            slice.inversion_residual.size());
                emit(out, out_tr,
                     "solve-transport " + tr_scenario + " t=" + std::to_string(t_index) +
                         " u[0]=" + io::format_double(slice.u[0]));
            }
            return 0;
        }

        if (c_conv->parsed()) {
            merge_config(cfg_file, r_conv, d_conv);
            merge_one(cfg_file, "study", o_conv_study, study);
            merge_one(cfg_file, "levels", o_conv_levels, levels);
            merge_one(cfg_file, "stride", o_conv_stride, stride);
            merge_one(cfg_file, "rate-outer", o_conv_g, fc_g);
            merge_one(cfg_file, "rate-inner", o_conv_f, fc_f);
            merge_one(cfg_file, "x", o_conv_x, fc_x);
            merge_one(cfg_file, "probes", o_conv_probes, conv_probes);
            merge_one(cfg_file, "out", o_conv_out, out_conv);
            json cfg = driver_config(d_conv);
            cfg["study"] = study;
            cfg["levels"] = levels;

            ConvergenceReport report;
            if (study == "defect") {
                cfg["stride"] = stride;
                const DriverOpts fine_opts = d_conv;
                DriverOpts scaled = fine_opts;
                scaled.n = d_conv.n * stride;
                const RoughPath fine = build_driver(scaled);
                const RoughPath coarse = restrict_stride(fine, stride);
                const auto trig = [](const RoughPath& q) {
                    const std::size_t n = q.n_steps(), dd = q.dim();
                    Mat values(n + 1, dd);
                    std::vector<Mat> gub(n + 1, Mat::Zero(dd, dd));
                    for (std::size_t i = 0; i <= n; ++i)
                        for (std::size_t b = 0; b < dd; ++b) {
                            const double x = q.value(i)[b];
                            values(i, b) = (b % 2 == 0) ? std::sin(x) : std::cos(x);
                            gub[i](b, b) = (b % 2 == 0) ? std::cos(x) : -std::sin(x);
                        }
                    return RowControlledPath(q, values, gub);
                };
                report = integrate::defect_ladder(trig(coarse), trig(fine), stride, coarse.alpha(),
                                                  levels);
            } else if (study.rfind("wentzell:", 0) == 0) {
                const RoughPath master = build_driver(d_conv);
                report = scenarios::wentzell_scenario_ladder(study.substr(9), master, levels)
                             .ladder;
            } else if (study == "flow-composition") {
                cfg["rate-outer"] = fc_g;
                cfg["rate-inner"] = fc_f;
                cfg["x"] = fc_x;
                const RoughPath master = build_driver(d_conv);
                report = rde::flow_composition_ladder(rde::linear_field(fc_g, master.dim()),
                                                      rde::linear_field(fc_f, master.dim()),
                                                      master, fc_x, levels);
            } else if (study.rfind("transport-residual", 0) == 0) {
                cfg["probes"] = conv_probes;
                const auto parts = split(study, ':');
                const std::string scen = parts.size() >= 2 ? parts[1] : "translate";
                const RoughPath master = build_driver(d_conv);
                const auto spec = transport_spec(scen, master.dim());
                const auto probe_parts = split(conv_probes, ':');
                Vec probes(probe_parts.size());
                for (std::size_t k = 0; k < probe_parts.size(); ++k)
                    probes[k] = std::stod(probe_parts[k]);
                report = characteristics::pde_residual_ladder(spec, master, probes, levels);
            } else {
                throw argument_error("unknown study '" + study + "'");
            }

            json out;
            out["meta"] = make_meta("convergence", cfg);
            out["config"] = cfg;
            out["report"] = io::convergence_to_json(report);
            emit(out, out_conv,
                 std::string(report.pass ? "PASS" : "FAIL") + " convergence " + study +
                     (report.exact ? std::string(" exact")
                                   : " slope=" + io::format_double(report.slope) + " target=" +
                                         io::format_double(report.target_slope)));
            return report.pass ? 0 : 2;
        }
    } catch (const argument_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const divergence_error& e) {
        std::cerr << "diverged: " << e.what() << " (step " << e.step_index << ")\n";
        return 2;
    } catch (const precondition_error& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
