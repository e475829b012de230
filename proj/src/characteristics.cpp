#include "roughw/characteristics.hpp"

#include "roughw/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace roughw::characteristics {

namespace {

Eigen::Index ei(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

void check_spec(const SemilinearSpec& spec) {
    require(spec.dim >= 1 && spec.driver >= 1, "spec needs positive dimensions");
    require(spec.P.size() == spec.driver && spec.DP.size() == spec.driver &&
                spec.Q.size() == spec.driver && spec.Qx.size() == spec.driver &&
                spec.Qu.size() == spec.driver,
            "spec needs one coefficient entry per driver direction");
    for (std::size_t j = 0; j < spec.driver; ++j)
        require(spec.P[j] && spec.DP[j] && spec.Q[j] && spec.Qx[j] && spec.Qu[j],
                "spec coefficient callables must all be set");
    require(static_cast<bool>(spec.phi) && static_cast<bool>(spec.Dphi),
            "spec needs phi and Dphi");
    require(spec.x_lo < spec.x_hi, "spatial window must be nonempty");
    require(spec.grid_n >= 8, "spatial grid is too coarse");
}

rde::VectorField semilinearfield_impl(const SemilinearSpec& spec) {
    const std::size_t d = spec.dim, n = spec.driver, m = d + 1;
    rde::VectorField field;
    field.state_dim = m;
    field.driver_dim = n;
    field.f = [spec, d, n, m](const Vec& y) {
        const Vec a = y.head(ei(d));
        const double b = y[ei(d)];
        Mat out(ei(m), ei(n));
        for (std::size_t j = 0; j < n; ++j) {
            const Vec pj = spec.P[j](a);
            for (std::size_t r = 0; r < d; ++r) out(ei(r), ei(j)) = -pj[ei(r)];
            out(ei(d), ei(j)) = spec.Q[j](a, b);
        }
        return out;
    };
    field.Df = [spec, d, n, m](const Vec& y) {
        const Vec a = y.head(ei(d));
        const double b = y[ei(d)];
        std::vector<Mat> slices(m, Mat::Zero(ei(m), ei(n)));
        for (std::size_t j = 0; j < n; ++j) {
            const Mat dpj = spec.DP[j](a);
            const Vec qx = spec.Qx[j](a, b);
            for (std::size_t k = 0; k < d; ++k) {
                for (std::size_t r = 0; r < d; ++r)
                    slices[k](ei(r), ei(j)) = -dpj(ei(r), ei(k));
                slices[k](ei(d), ei(j)) = qx[ei(k)];
            }
            slices[d](ei(d), ei(j)) = spec.Qu[j](a, b);
        }
        return slices;
    };
    return field;
}

rde::VectorField semilinear_field(const SemilinearSpec& spec) {
    check_spec(spec);
    return semilinearfield_impl(spec);
}

ControlledPath solve_characteristics(const SemilinearSpec& spec, const Vec& y,
                                     const RoughPath& p) {
    check_spec(spec);
    require(spec.driver == p.dim(), "spec driver dimension does not match the path");
    require(static_cast<std::size_t>(y.size()) == spec.dim, "start point has the wrong dimension");
    Vec y0(ei(spec.dim + 1));
    y0.head(ei(spec.dim)) = y;
    y0[ei(spec.dim)] = spec.phi(y);
    return rde::solve_rde(semilinearfield_impl(spec), y0, p);
}

namespace {

void check_full(const FullSpec& spec) {
    require(spec.dim >= 1 && spec.driver >= 1, "spec needs positive dimensions");
    require(spec.F.size() == spec.driver && spec.Fp.size() == spec.driver &&
                spec.Fx.size() == spec.driver && spec.Fu.size() == spec.driver,
            "spec needs one F entry with partials per driver direction");
    require(spec.Fb.empty() || spec.Fb.size() == spec.driver,
            "reduced b rows need one entry per driver direction when present");
    for (std::size_t j = 0; j < spec.driver; ++j) {
        require(spec.F[j] && spec.Fp[j] && spec.Fx[j] && spec.Fu[j],
                "F callables must all be set");
        if (!spec.Fb.empty()) require(static_cast<bool>(spec.Fb[j]), "empty reduced b row");
    }
    require(static_cast<bool>(spec.phi) && static_cast<bool>(spec.Dphi),
            "spec needs phi and Dphi");
}

}  // namespace

rde::VectorField full_field(const FullSpec& spec) {
    check_full(spec);
    const std::size_t d = spec.dim, n = spec.driver, m = 2 * d + 1;
    rde::VectorField field;
    field.state_dim = m;
    field.driver_dim = n;
    field.f = [spec, d, n, m](const Vec& y) {
        const Vec x = y.head(ei(d));
        const double u = y[ei(d)];
        const Vec c = y.tail(ei(d));
        Mat out(ei(m), ei(n));
        for (std::size_t j = 0; j < n; ++j) {
            const Vec fp = spec.Fp[j](x, u, c);
            for (std::size_t r = 0; r < d; ++r) out(ei(r), ei(j)) = -fp[ei(r)];
            out(ei(d), ei(j)) = spec.Fb.empty() ? spec.F[j](x, u, c) - fp.dot(c)
                                                : spec.Fb[j](x, u, c);
            const Vec fx = spec.Fx[j](x, u, c);
            const double fu = spec.Fu[j](x, u, c);
            for (std::size_t r = 0; r < d; ++r)
                out(ei(d + 1 + r), ei(j)) = fx[ei(r)] + fu * c[ei(r)];
        }
        return out;
    };
    if (spec.Df) {
        field.Df = spec.Df;
    } else {
        field = rde::with_fd_jacobian(std::move(field));
    }
    return field;
}

ControlledPath solve_full_characteristics(const FullSpec& spec, const Vec& y,
                                          const RoughPath& p) {
    check_full(spec);
    require(spec.driver == p.dim(), "spec driver dimension does not match the path");
    require(static_cast<std::size_t>(y.size()) == spec.dim, "start point has the wrong dimension");
    Vec y0(ei(2 * spec.dim + 1));
    y0.head(ei(spec.dim)) = y;
    y0[ei(spec.dim)] = spec.phi(y);
    y0.tail(ei(spec.dim)) = spec.Dphi(y);
    return rde::solve_rde(full_field(spec), y0, p);
}

FullSpec full_from_semilinear(const SemilinearSpec& spec) {
    check_spec(spec);
    const std::size_t d = spec.dim, n = spec.driver, m = 2 * d + 1;
    FullSpec out;
    out.dim = d;
    out.driver = n;
    out.phi = spec.phi;
    out.Dphi = spec.Dphi;
    for (std::size_t j = 0; j < n; ++j) {
        auto P = spec.P[j];
        auto DP = spec.DP[j];
        auto Q = spec.Q[j];
        auto Qx = spec.Qx[j];
        auto Qu = spec.Qu[j];
        out.F.push_back([P, Q](const Vec& x, double u, const Vec& p) {
            return P(x).dot(p) + Q(x, u);
        });
        out.Fp.push_back([P](const Vec& x, double, const Vec&) { return P(x); });
        out.Fx.push_back([DP, Qx](const Vec& x, double u, const Vec& p) {
            return Vec(DP(x).transpose() * p + Qx(x, u));
        });
        out.Fu.push_back([Qu](const Vec& x, double u, const Vec&) { return Qu(x, u); });
        out.Fb.push_back([Q](const Vec& x, double u, const Vec&) { return Q(x, u); });
    }
    // a and b rows analytically (same callables as the semilinear pair, so the
    // shared rows repeat the same arithmetic); c rows by central differences
    out.Df = [spec, d, n, m](const Vec& y) {
        const Vec a = y.head(ei(d));
        const double b = y[ei(d)];
        std::vector<Mat> slices(m, Mat::Zero(ei(m), ei(n)));
        for (std::size_t j = 0; j < n; ++j) {
            const Mat dpj = spec.DP[j](a);
            const Vec qx = spec.Qx[j](a, b);
            for (std::size_t k = 0; k < d; ++k) {
                for (std::size_t r = 0; r < d; ++r)
                    slices[k](ei(r), ei(j)) = -dpj(ei(r), ei(k));
                slices[k](ei(d), ei(j)) = qx[ei(k)];
            }
            slices[d](ei(d), ei(j)) = spec.Qu[j](a, b);
        }
        auto crow = [&spec, d, n](const Vec& yy) {
            const Vec ax = yy.head(ei(d));
            const double bu = yy[ei(d)];
            const Vec cc = yy.tail(ei(d));
            Mat vals(ei(d), ei(n));
            for (std::size_t j = 0; j < n; ++j) {
                const Vec fx = spec.DP[j](ax).transpose() * cc + spec.Qx[j](ax, bu);
                const double fu = spec.Qu[j](ax, bu);
                for (std::size_t r = 0; r < d; ++r)
                    vals(ei(r), ei(j)) = fx[ei(r)] + fu * cc[ei(r)];
            }
            return vals;
        };
        for (std::size_t k = 0; k < m; ++k) {
            const double h = 1e-6 * (1.0 + std::abs(y[ei(k)]));
            Vec hi = y, lo = y;
            hi[ei(k)] += h;
            lo[ei(k)] -= h;
            const Mat diff = (crow(hi) - crow(lo)) / (2.0 * h);
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t j = 0; j < n; ++j)
                    slices[k](ei(d + 1 + r), ei(j)) = diff(ei(r), ei(j));
        }
        return slices;
    };
    return out;
}

InversionResult invert_a(const Vec& ys, const Vec& as, double x) {
    const Eigen::Index count = ys.size();
    require(count >= 2 && as.size() == count, "inversion needs matching samples");
    const bool inc = as[count - 1] > as[0];
    for (Eigen::Index i = 0; i + 1 < count; ++i) {
        const double diff = as[i + 1] - as[i];
        if (inc ? diff <= 0 : diff >= 0)
            throw precondition_error("characteristic samples are not strictly monotone");
    }
    const double lo = std::min(as[0], as[count - 1]);
    const double hi = std::max(as[0], as[count - 1]);
    if (x < lo || x > hi)
        throw argument_error("x = " + std::to_string(x) +
                             " is outside the sampled characteristic range [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    Eigen::Index a = 0, b = count - 1;
    while (b - a > 1) {
        const Eigen::Index mid = (a + b) / 2;
        if (inc ? as[mid] <= x : as[mid] >= x)
            a = mid;
        else
            b = mid;
    }
    InversionResult out;
    const double t = (x - as[a]) / (as[b] - as[a]);
    out.preimage = ys[a] + t * (ys[b] - ys[a]);
    out.cell_width = std::abs(ys[b] - ys[a]);
    out.cell_slope = (ys[b] - ys[a]) / (as[b] - as[a]);
    out.increasing = inc;
    return out;
}

TransportSolver::TransportSolver(SemilinearSpec spec, const RoughPath& p)
    : spec_(std::move(spec)), driver_(&p) {
    check_spec(spec_);
    require(spec_.dim == 1, "transport assembly is implemented for one space dimension");
    require(spec_.driver == p.dim(), "spec driver dimension does not match the path");
    if (!p.is_weak_geometric())
        throw precondition_error(
            "transport needs a weak geometric driver; geometrize the lift first");

    const double step = (spec_.x_hi - spec_.x_lo) / static_cast<double>(spec_.grid_n);
    // per-coordinate oscillation of the driver over the whole horizon
    Vec osc(ei(spec_.driver));
    for (std::size_t j = 0; j < spec_.driver; ++j) {
        const auto col = p.values().col(ei(j));
        osc[ei(j)] = col.maxCoeff() - col.minCoeff();
    }
    // pad the start window so every preimage of [x_lo, x_hi] is sampled; two
    // passes because sup |P| itself is taken over the padded window
    double pad = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const double wlo = spec_.x_lo - pad, whi = spec_.x_hi + pad;
        double drift = 0.0;
        for (std::size_t j = 0; j < spec_.driver; ++j) {
            double sup = 0.0;
            for (int s = 0; s <= 256; ++s) {
                Vec xs(1);
                xs[0] = wlo + (whi - wlo) * static_cast<double>(s) / 256.0;
                sup = std::max(sup, std::abs(spec_.P[j](xs)[0]));
            }
            drift += sup * osc[ei(j)];
        }
        pad = 1.1 * drift + 4.0 * step;
    }
    const double wlo = spec_.x_lo - pad;
    const auto points =
        static_cast<std::size_t>(std::ceil((spec_.x_hi + pad - wlo) / step)) + 1;
    require(points <= 200000, "start grid would be excessively large");
    starts_.resize(ei(points));
    for (std::size_t i = 0; i < points; ++i)
        starts_[ei(i)] = wlo + static_cast<double>(i) * step;

    const std::size_t rows = p.n_steps() + 1;
    a_.resize(ei(rows), ei(points));
    b_.resize(ei(rows), ei(points));
    const auto field = semilinearfield_impl(spec_);
    parallel_for(points, [&](std::size_t col) {
        Vec y0(2);
        y0[0] = starts_[ei(col)];
        Vec ahead = y0.head(1);
        y0[1] = spec_.phi(ahead);
        const auto path = rde::solve_rde(field, y0, p);
        a_.col(ei(col)) = path.values().col(0);
        b_.col(ei(col)) = path.values().col(1);
    });
}

std::pair<double, double> TransportSolver::query(std::size_t t_index, double x) const {
    driver_->grid().check(t_index);
    const Vec arow = a_.row(ei(t_index)).transpose();
    const auto inv = invert_a(starts_, arow, x);
    const auto field = semilinearfield_impl(spec_);
    auto run = [&](double y0) {
        Vec y(2);
        y[0] = y0;
        Vec head = y.head(1);
        y[1] = spec_.phi(head);
        const auto path = rde::solve_rde(field, y, *driver_);
        return std::make_pair(path.values()(ei(t_index), 0), path.values()(ei(t_index), 1));
    };
    auto [av, bv] = run(inv.preimage);
    double residual = std::abs(av - x);
    double u = bv;
    if (residual > 1e-12 * (1.0 + std::abs(x))) {
        // one correction step along the local slope of the sampled map
        const double y2 = inv.preimage + (x - av) * inv.cell_slope;
        const auto [av2, bv2] = run(y2);
        if (std::abs(av2 - x) < residual) {
            residual = std::abs(av2 - x);
            u = bv2;
        }
    }
    return {u, residual};
}

TransportSlice TransportSolver::slice(std::size_t t_index, const Vec& x_points) const {
    TransportSlice out;
    const auto count = static_cast<std::size_t>(x_points.size());
    out.u.resize(ei(count));
    out.inversion_residual.resize(ei(count));
    parallel_for(count, [&](std::size_t i) {
        const auto [u, residual] = query(t_index, x_points[ei(i)]);
        out.u[ei(i)] = u;
        out.inversion_residual[ei(i)] = residual;
    });
    return out;
}

Mat TransportSolver::path(const Vec& x_points) const {
    const auto count = static_cast<std::size_t>(x_points.size());
    const std::size_t rows = driver_->n_steps() + 1;
    Mat out(ei(rows), ei(count));
    parallel_for(count, [&](std::size_t col) {
        for (std::size_t t = 0; t < rows; ++t)
            out(ei(t), ei(col)) = query(t, x_points[ei(col)]).first;
    });
    return out;
}

TransportSlice solve_semilinear(const SemilinearSpec& spec, const RoughPath& p,
                                std::size_t t_index, const Vec& x_points) {
    return TransportSolver(spec, p).slice(t_index, x_points);
}

StructureReport structure_check(const SemilinearSpec& spec, const RoughPath& p,
                                std::size_t time_samples, double fd_step) {
    require(time_samples >= 1 && fd_step > 0, "structure check needs samples and a step");
    const TransportSolver solver(spec, p);
    const auto full = full_from_semilinear(spec);
    const std::size_t n = p.n_steps();

    StructureReport report;
    for (int s = 1; s <= 3; ++s) {
        Vec y(1);
        y[0] = spec.x_lo + (spec.x_hi - spec.x_lo) * static_cast<double>(s) / 4.0;
        const auto triple = solve_full_characteristics(full, y, p);
        for (std::size_t k = 1; k <= time_samples; ++k) {
            const std::size_t t = std::min(n, k * n / time_samples);
            const double at = triple.values()(ei(t), 0);
            const double bt = triple.values()(ei(t), 1);
            const double ct = triple.values()(ei(t), 2);
            const double u0 = solver.query(t, at).first;
            const double up = solver.query(t, at + fd_step).first;
            const double um = solver.query(t, at - fd_step).first;
            report.b_discrepancy = std::max(report.b_discrepancy, std::abs(bt - u0));
            report.c_discrepancy =
                std::max(report.c_discrepancy, std::abs(ct - (up - um) / (2.0 * fd_step)));
            ++report.points;
        }
    }
    return report;
}

PdeResidualReport pde_residual(const SemilinearSpec& spec, const RoughPath& p,
                               const Vec& x_probes, double fd_step) {
    require(x_probes.size() >= 1 && fd_step > 0, "residual needs probes and a step");
    const TransportSolver solver(spec, p);
    const std::size_t n = p.n_steps(), nd = p.dim();

    PdeResidualReport report;
    for (Eigen::Index probe = 0; probe < x_probes.size(); ++probe) {
        const double x = x_probes[probe];
        Vec stencil(9);
        for (int k = -4; k <= 4; ++k) stencil[k + 4] = x + k * fd_step;
        const Mat u = solver.path(stencil);  // (n+1) x 9, column 4 is x itself

        // D_x u at offsets |k| <= 2 by the 4th-order 5-point stencil
        Mat du(ei(n + 1), 5);
        for (int k = -2; k <= 2; ++k) {
            const int c = k + 4;
            du.col(k + 2) = (-u.col(c + 2) + 8.0 * u.col(c + 1) - 8.0 * u.col(c - 1) +
                             u.col(c - 2)) /
                            (12.0 * fd_step);
        }

        Mat rows(ei(n + 1), ei(nd));
        std::vector<Mat> gub(n + 1);
        std::vector<Mat> coeff_at(5);  // integrand rows at the inner stencil offsets
        for (int k = -2; k <= 2; ++k) {
            Mat& c = coeff_at[k + 2];
            c.resize(ei(n + 1), ei(nd));
            Vec xs(1);
            xs[0] = x + k * fd_step;
            for (std::size_t j = 0; j < nd; ++j) {
                const double pj = spec.P[j](xs)[0];
                for (std::size_t t = 0; t <= n; ++t)
                    c(ei(t), ei(j)) = du(ei(t), k + 2) * pj +
                                      spec.Q[j](xs, u(ei(t), k + 4));
            }
        }
        Vec x0(1);
        x0[0] = x;
        rows = coeff_at[2];
        for (std::size_t t = 0; t <= n; ++t) {
            Mat g(ei(nd), ei(nd));
            for (std::size_t a = 0; a < nd; ++a) {
                const double dxy = (-coeff_at[4](ei(t), ei(a)) + 8.0 * coeff_at[3](ei(t), ei(a)) -
                                    8.0 * coeff_at[1](ei(t), ei(a)) + coeff_at[0](ei(t), ei(a))) /
                                   (12.0 * fd_step);
                for (std::size_t b = 0; b < nd; ++b) {
                    const double pb = spec.P[b](x0)[0];
                    g(ei(a), ei(b)) = dxy * pb + spec.Qu[b](x0, u(ei(t), 4)) * rows(ei(t), ei(a));
                }
            }
            gub[t] = g;
        }

        RowControlledPath integrand(p, rows, gub);
        const auto integral = integrate::rough_integral(integrand);
        const double phix = spec.phi(x0);
        for (std::size_t t = 0; t <= n; ++t) {
            const double r = std::abs(u(ei(t), 4) - phix - integral.path.values()(ei(t), 0));
            report.residual_max = std::max(report.residual_max, r);
        }
        report.scale = std::max(report.scale, 1.0 + u.col(4).cwiseAbs().maxCoeff());
    }
    return report;
}

ConvergenceReport pde_residual_ladder(const SemilinearSpec& spec, const RoughPath& p,
                                      const Vec& x_probes, std::size_t levels,
                                      double fd_step) {
    require(levels >= 2, "ladder needs at least 2 levels");
    std::size_t stride = 1;
    for (std::size_t l = 1; l < levels; ++l) stride *= 2;
    require(p.n_steps() % stride == 0, "step count does not divide into the ladder");

    std::vector<double> mesh, residual;
    double scale = 1.0;
    for (std::size_t l = 0; l < levels; ++l, stride /= 2) {
        const auto q = restrict_stride(p, stride);
        const auto report = pde_residual(spec, q, x_probes, fd_step);
        mesh.push_back(static_cast<double>(q.n_steps()));
        residual.push_back(report.residual_max);
        scale = report.scale;
    }
    return fit_ladder("transport-residual", p.alpha(), mesh, residual, scale,
                      -(3.0 * p.alpha() - 1.0), 0.4);
}

SemilinearSpec transport_scenario(const std::string& name, std::size_t driver_dim) {
    require(driver_dim >= 1, "scenario needs a positive driver dimension");
    SemilinearSpec spec;
    spec.dim = 1;
    spec.driver = driver_dim;
    if (name == "translate") {
        for (std::size_t j = 0; j < driver_dim; ++j) {
            const double c = 0.7 / static_cast<double>(1 + j);
            spec.P.push_back([c](const Vec&) { return Vec::Constant(1, c); });
            spec.DP.push_back([](const Vec&) { return Mat::Zero(1, 1); });
            spec.Q.push_back([](const Vec&, double) { return 0.0; });
            spec.Qx.push_back([](const Vec&, double) { return Vec::Zero(1); });
            spec.Qu.push_back([](const Vec&, double) { return 0.0; });
        }
        spec.phi = [](const Vec& x) { return x[0] * x[0]; };
        spec.Dphi = [](const Vec& x) { return Vec::Constant(1, 2.0 * x[0]); };
    } else if (name == "linear") {
        for (std::size_t j = 0; j < driver_dim; ++j) {
            spec.P.push_back([](const Vec& x) { return Vec::Constant(1, x[0]); });
            spec.DP.push_back([](const Vec&) { return Mat::Constant(1, 1, 1.0); });
            spec.Q.push_back([](const Vec&, double) { return 0.0; });
            spec.Qx.push_back([](const Vec&, double) { return Vec::Zero(1); });
            spec.Qu.push_back([](const Vec&, double) { return 0.0; });
        }
        spec.phi = [](const Vec& x) { return x[0]; };
        spec.Dphi = [](const Vec&) { return Vec::Constant(1, 1.0); };
    } else {
        throw argument_error("unknown transport scenario '" + name + "'");
    }
    return spec;
}

}  // namespace roughw::characteristics
