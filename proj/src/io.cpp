#include "roughw/io.hpp"

#include <cstdio>
#include <fstream>

namespace roughw::io {

namespace {

Eigen::Index ei(std::size_t v) { return static_cast<Eigen::Index>(v); }

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vec vec_from_json(const json& j) {
    require(j.is_array(), "expected an array of numbers");
    Vec out(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& v : j) {
        require(v.is_number(), "expected an array of numbers");
        out[i++] = v.get<double>();
    }
    return out;
}

}  // namespace

json rough_path_to_json(const RoughPath& p) {
    const std::size_t n = p.n_steps(), d = p.dim();
    json j;
    j["alpha"] = p.alpha();
    j["horizon"] = p.grid().horizon();
    j["dim"] = d;
    j["times"] = vec_to_json(p.grid().times());
    json values = json::array();
    json cum2 = json::array();
    for (std::size_t i = 0; i <= n; ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < d; ++c) row.push_back(p.values()(ei(i), ei(c)));
        values.push_back(std::move(row));
        json tens = json::array();
        const Mat& a = p.second_level(0, i);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) tens.push_back(a(ei(r), ei(c)));
        cum2.push_back(std::move(tens));
    }
    j["values"] = std::move(values);
    j["cum2"] = std::move(cum2);
    return j;
}

RoughPath rough_path_from_json(const json& j) {
    for (const char* key : {"alpha", "dim", "times", "values", "cum2"})
        require(j.contains(key), std::string("rough-path file is missing '") + key + "'");
    const auto d = j.at("dim").get<std::size_t>();
    require(d >= 1, "rough-path file has a non-positive dimension");
    const Vec times = vec_from_json(j.at("times"));
    TimeGrid grid(times);
    const auto& jv = j.at("values");
    const auto& jc = j.at("cum2");
    require(jv.is_array() && jv.size() == grid.n_points(),
            "rough-path file needs one value row per grid point");
    require(jc.is_array() && jc.size() == grid.n_points(),
            "rough-path file needs one tensor per grid point");
    Mat values(ei(grid.n_points()), ei(d));
    std::vector<Mat> cum2(grid.n_points(), Mat(ei(d), ei(d)));
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const Vec row = vec_from_json(jv.at(i));
        require(static_cast<std::size_t>(row.size()) == d, "value row has the wrong width");
        values.row(ei(i)) = row.transpose();
        const Vec tens = vec_from_json(jc.at(i));
        require(static_cast<std::size_t>(tens.size()) == d * d,
                "tensor entry has the wrong size");
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) cum2[i](ei(r), ei(c)) = tens[ei(r * d + c)];
    }
    return RoughPath(grid, values, cum2, j.at("alpha").get<double>());
}

void save_rough_path(const RoughPath& p, const std::string& file) {
    save_json(rough_path_to_json(p), file);
}

RoughPath load_rough_path(const std::string& file) {
    return rough_path_from_json(load_json(file));
}

json convergence_to_json(const ConvergenceReport& r) {
    json j;
    j["study"] = r.study;
    j["alpha"] = r.alpha;
    j["mesh"] = r.mesh;
    j["residual"] = r.residual;
    j["scale"] = r.scale;
    j["target_slope"] = r.target_slope;
    j["slope_tol"] = r.slope_tol;
    j["one_sided"] = r.one_sided;
    j["slope"] = r.slope;
    j["exact"] = r.exact;
    j["pass"] = r.pass;
    return j;
}

json wentzell_report_to_json(const wentzell::WentzellReport& r) {
    json j;
    j["alpha"] = r.alpha;
    j["n"] = r.n;
    j["lhs"] = vec_to_json(r.lhs);
    j["term_initial"] = vec_to_json(r.term_initial);
    j["term_h"] = vec_to_json(r.term_h);
    j["term_dg"] = vec_to_json(r.term_dg);
    j["term_dh_bracket"] = vec_to_json(r.term_dh_bracket);
    j["term_d2g_bracket"] = vec_to_json(r.term_d2g_bracket);
    j["residual_max"] = r.residual_max;
    j["scale"] = r.scale;
    return j;
}

json controlled_path_to_json(const ControlledPath& y) {
    const std::size_t n = y.n_steps(), m = y.dim(), d = y.driver().dim();
    json j;
    j["state_dim"] = m;
    json values = json::array();
    json gub = json::array();
    for (std::size_t i = 0; i <= n; ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m; ++c) row.push_back(y.values()(ei(i), ei(c)));
        values.push_back(std::move(row));
        json block = json::array();
        const Mat& g = y.gubinelli()[i];
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < d; ++c) block.push_back(g(ei(r), ei(c)));
        gub.push_back(std::move(block));
    }
    j["values"] = std::move(values);
    j["gubinelli"] = std::move(gub);
    return j;
}

ControlledPath controlled_path_from_json(const json& j, const RoughPath& driver) {
    for (const char* key : {"state_dim", "values", "gubinelli"})
        require(j.contains(key), std::string("controlled-path file is missing '") + key + "'");
    const auto m = j.at("state_dim").get<std::size_t>();
    const std::size_t d = driver.dim(), points = driver.grid().n_points();
    require(m >= 1, "controlled-path file has a non-positive state dimension");
    const auto& jv = j.at("values");
    const auto& jg = j.at("gubinelli");
    require(jv.is_array() && jv.size() == points,
            "controlled-path file needs one value row per grid point");
    require(jg.is_array() && jg.size() == points,
            "controlled-path file needs one derivative block per grid point");
    Mat values(ei(points), ei(m));
    std::vector<Mat> gub(points, Mat(ei(m), ei(d)));
    for (std::size_t i = 0; i < points; ++i) {
        const Vec row = vec_from_json(jv.at(i));
        require(static_cast<std::size_t>(row.size()) == m, "value row has the wrong width");
        values.row(ei(i)) = row.transpose();
        const Vec block = vec_from_json(jg.at(i));
        require(static_cast<std::size_t>(block.size()) == m * d,
                "derivative block has the wrong size");
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < d; ++c) gub[i](ei(r), ei(c)) = block[ei(r * d + c)];
    }
    return ControlledPath(driver, values, gub);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& file, const std::vector<std::string>& header,
               const Mat& table) {
    require(static_cast<Eigen::Index>(header.size()) == table.cols(),
            "csv header width does not match the table");
    std::ofstream out(file);
    require(out.good(), "cannot open '" + file + "' for writing");
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? "," : "\n");
    for (Eigen::Index r = 0; r < table.rows(); ++r)
        for (Eigen::Index c = 0; c < table.cols(); ++c)
            out << format_double(table(r, c)) << (c + 1 < table.cols() ? "," : "\n");
    require(out.good(), "writing '" + file + "' failed");
}

std::string config_hash(json config) {
    config.erase("out");
    const std::string dump = config.dump();
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : dump) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

json load_json(const std::string& file) {
    std::ifstream in(file);
    require(in.good(), "cannot open '" + file + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw argument_error("cannot parse '" + file + "': " + e.what());
    }
    return j;
}

void save_json(const json& j, const std::string& file) {
    std::ofstream out(file);
    require(out.good(), "cannot open '" + file + "' for writing");
    out << j.dump(2) << "\n";
    require(out.good(), "writing '" + file + "' failed");
}

}  // namespace roughw::io
