#include "roughw/lifts.hpp"

#include <cmath>

namespace roughw::lifts {

namespace {

// A_{i+1} = A_i + X_{0,i} (x) inc_i + cell_i, the cumulative form of Chen.
RoughPath assemble(TimeGrid grid, Mat values, const std::vector<Mat>& cell, double alpha) {
    const std::size_t n = grid.n_steps();
    const auto d = values.cols();
    std::vector<Mat> cum2(n + 1, Mat::Zero(d, d));
    for (std::size_t i = 0; i < n; ++i) {
        const Vec from_start =
            (values.row(static_cast<Eigen::Index>(i)) - values.row(0)).transpose();
        const Vec inc = (values.row(static_cast<Eigen::Index>(i + 1)) -
                         values.row(static_cast<Eigen::Index>(i)))
                            .transpose();
        cum2[i + 1] = cum2[i] + from_start * inc.transpose() + cell[i];
    }
    return RoughPath(std::move(grid), std::move(values), std::move(cum2), alpha);
}

}  // namespace

RoughPath lift_piecewise_linear(const TimeGrid& grid, const Mat& samples, double alpha) {
    require(static_cast<std::size_t>(samples.rows()) == grid.n_points(),
            "piecewise-linear lift needs one sample per grid point");
    const std::size_t n = grid.n_steps();
    std::vector<Mat> cell(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec inc = (samples.row(static_cast<Eigen::Index>(i + 1)) -
                         samples.row(static_cast<Eigen::Index>(i)))
                            .transpose();
        cell[i] = 0.5 * inc * inc.transpose();
    }
    return assemble(grid, samples, cell, alpha);
}

RoughPath lift_brownian_ito(std::uint64_t seed, std::size_t dim, std::size_t n, double horizon,
                            std::size_t m, double alpha) {
    require(dim >= 1, "brownian lift needs dim >= 1");
    require(n >= 1, "brownian lift needs n >= 1");
    require(m >= 1, "brownian lift needs subsample factor >= 1");
    const double dt = horizon / static_cast<double>(n);
    GaussianStream stream(seed);

    Mat coarse_inc(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < dim; ++c)
            coarse_inc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                std::sqrt(dt) * stream.next();

    TimeGrid grid = TimeGrid::uniform(n, horizon);
    Mat values = Mat::Zero(n + 1, dim);
    for (std::size_t i = 0; i < n; ++i)
        values.row(static_cast<Eigen::Index>(i + 1)) =
            values.row(static_cast<Eigen::Index>(i)) + coarse_inc.row(static_cast<Eigen::Index>(i));

    std::vector<Mat> cell(n, Mat::Zero(dim, dim));
    const Mat ito_shift = 0.5 * dt * Mat::Identity(dim, dim);
    if (m == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec inc = coarse_inc.row(static_cast<Eigen::Index>(i)).transpose();
            cell[i] = 0.5 * inc * inc.transpose() - ito_shift;
        }
        return assemble(std::move(grid), std::move(values), cell, alpha);
    }

    const double fdt = dt / static_cast<double>(m);
    Mat fine(m, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t c = 0; c < dim; ++c)
                fine(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
                    std::sqrt(fdt) * stream.next();
        const Eigen::RowVectorXd correction =
            (coarse_inc.row(static_cast<Eigen::Index>(i)) - fine.colwise().sum()) /
            static_cast<double>(m);
        fine.rowwise() += correction;
        // Piecewise-linear tensor of the refined cell relative to its left knot.
        Vec run = Vec::Zero(dim);
        Mat acc = Mat::Zero(dim, dim);
        for (std::size_t k = 0; k < m; ++k) {
            const Vec inc = fine.row(static_cast<Eigen::Index>(k)).transpose();
            acc += run * inc.transpose() + 0.5 * inc * inc.transpose();
            run += inc;
        }
        cell[i] = acc - ito_shift;
    }
    return assemble(std::move(grid), std::move(values), cell, alpha);
}

RoughPath lift_pure_area(const Mat& area, std::size_t n, double horizon, double alpha) {
    require(area.rows() == area.cols() && area.rows() >= 1, "area matrix must be square");
    require((area + area.transpose()).norm() <= 1e-14 * (1.0 + area.norm()),
            "area matrix must be antisymmetric");
    const auto d = area.rows();
    TimeGrid grid = TimeGrid::uniform(n, horizon);
    Mat values = Mat::Zero(n + 1, d);
    std::vector<Mat> cell(n, (horizon / static_cast<double>(n)) * area);
    return assemble(std::move(grid), std::move(values), cell, alpha);
}

RoughPath lift_smooth(const std::function<Vec(double)>& f, const std::function<Vec(double)>& fprime,
                      std::size_t dim, std::size_t n, double horizon, double alpha) {
    static const double gl_node[5] = {-0.906179845938663992797626878299,
                                      -0.538469310105683091036314420700, 0.0,
                                      0.538469310105683091036314420700,
                                      0.906179845938663992797626878299};
    static const double gl_weight[5] = {0.236926885056189087514264040720,
                                        0.478628670499366468041291514836,
                                        0.568888888888888888888888888889,
                                        0.478628670499366468041291514836,
                                        0.236926885056189087514264040720};
    TimeGrid grid = TimeGrid::uniform(n, horizon);
    Mat values(n + 1, dim);
    for (std::size_t i = 0; i <= n; ++i) {
        const Vec v = f(grid.time(i));
        require(static_cast<std::size_t>(v.size()) == dim, "curve dimension mismatch");
        values.row(static_cast<Eigen::Index>(i)) = v.transpose();
    }
    std::vector<Mat> cell(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = grid.time(i), b = grid.time(i + 1);
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        Mat acc = Mat::Zero(dim, dim);
        const Vec left = f(a);
        for (int q = 0; q < 5; ++q) {
            const double u = mid + half * gl_node[q];
            acc += gl_weight[q] * (f(u) - left) * fprime(u).transpose();
        }
        cell[i] = half * acc;
    }
    return assemble(std::move(grid), std::move(values), cell, alpha);
}

Vec sample_curve(const std::string& name, std::size_t dim, double t) {
    if (name == "circle") {
        require(dim == 2, "circle sample is 2-dimensional");
        Vec v(2);
        v << std::cos(2.0 * M_PI * t), std::sin(2.0 * M_PI * t);
        return v;
    }
    if (name == "tt2") {
        require(dim == 2, "tt2 sample is 2-dimensional");
        Vec v(2);
        v << t, t * t;
        return v;
    }
    if (name == "line") {
        Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
        v[0] = t;
        return v;
    }
    throw argument_error("unknown sample curve: " + name);
}

Vec sample_curve_derivative(const std::string& name, std::size_t dim, double t) {
    if (name == "circle") {
        Vec v(2);
        v << -2.0 * M_PI * std::sin(2.0 * M_PI * t), 2.0 * M_PI * std::cos(2.0 * M_PI * t);
        return v;
    }
    if (name == "tt2") {
        Vec v(2);
        v << 1.0, 2.0 * t;
        return v;
    }
    if (name == "line") {
        Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
        v[0] = 1.0;
        return v;
    }
    throw argument_error("unknown sample curve: " + name);
}

RoughPath make_lift(const LiftSpec& spec) {
    switch (spec.kind) {
        case LiftKind::piecewise_linear: {
            TimeGrid grid = TimeGrid::uniform(spec.n, spec.horizon);
            Mat samples(spec.n + 1, spec.dim);
            for (std::size_t i = 0; i <= spec.n; ++i)
                samples.row(static_cast<Eigen::Index>(i)) =
                    sample_curve(spec.sample, spec.dim, grid.time(i)).transpose();
            return lift_piecewise_linear(grid, samples, spec.alpha);
        }
        case LiftKind::brownian_ito:
            return lift_brownian_ito(spec.seed, spec.dim, spec.n, spec.horizon, spec.subsample,
                                     spec.alpha);
        case LiftKind::pure_area: {
            Mat a = spec.area;
            if (a.size() == 0) {
                require(spec.dim == 2, "default pure-area matrix is 2-dimensional");
                a = Mat::Zero(2, 2);
                a(0, 1) = 1.0;
                a(1, 0) = -1.0;
            }
            return lift_pure_area(a, spec.n, spec.horizon, spec.alpha);
        }
        case LiftKind::smooth:
            return lift_smooth([&](double t) { return sample_curve(spec.sample, spec.dim, t); },
                               [&](double t) {
                                   return sample_curve_derivative(spec.sample, spec.dim, t);
                               },
                               spec.dim, spec.n, spec.horizon, spec.alpha);
    }
    throw argument_error("unknown lift kind");
}

}  // namespace roughw::lifts
