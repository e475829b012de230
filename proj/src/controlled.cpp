#include "roughw/controlled.hpp"

#include <cmath>

namespace roughw {

ControlledPath canonical_lift(const RoughPath& p) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    std::vector<Mat> gub(p.grid().n_points(), Mat::Identity(d, d));
    return ControlledPath(p, p.values(), std::move(gub));
}

ControlledPath coordinate_lift(const RoughPath& p, std::size_t c) {
    require(c < p.dim(), "coordinate index out of range");
    Mat values = p.values().col(static_cast<Eigen::Index>(c));
    Mat basis = Mat::Zero(1, static_cast<Eigen::Index>(p.dim()));
    basis(0, static_cast<Eigen::Index>(c)) = 1.0;
    std::vector<Mat> gub(p.grid().n_points(), basis);
    return ControlledPath(p, std::move(values), std::move(gub));
}

Vec remainder(const ControlledPath& y, std::size_t i, std::size_t j) {
    require(i <= j, "interval indices must be ordered");
    return y.increment(i, j) - y.derivative(i) * y.driver().increment(i, j);
}

ControlledNormReport controlled_norm(const ControlledPath& y, double alpha) {
    require_alpha(alpha);
    ControlledNormReport rep;
    rep.alpha = alpha;
    rep.y0_abs = y.value(0).norm();
    rep.dy0_abs = y.derivative(0).norm();
    const std::size_t n = y.n_steps();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            const double dt = y.driver().grid().dt(i, j);
            const double da = std::pow(dt, alpha);
            rep.dy_alpha = std::max(rep.dy_alpha, (y.derivative(j) - y.derivative(i)).norm() / da);
            rep.remainder_2alpha =
                std::max(rep.remainder_2alpha, remainder(y, i, j).norm() / (da * da));
        }
    }
    rep.total = rep.y0_abs + rep.dy0_abs + rep.dy_alpha + rep.remainder_2alpha;
    return rep;
}

Mat FieldFunction::jacobian(std::size_t ti, const Vec& x) const {
    if (jac) return jac(ti, x);
    // Central differences, step 1e-5 * (1 + |x|); fd_jacobian should be set by
    // the builder so reports can flag the fallback.
    const double h = 1e-5 * (1.0 + x.norm());
    Mat j(static_cast<Eigen::Index>(out_dim), x.size());
    for (Eigen::Index c = 0; c < x.size(); ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        j.col(c) = (eval(ti, xp) - eval(ti, xm)) / (2.0 * h);
    }
    return j;
}

Mat FieldFunction::gubinelli(std::size_t ti, const Vec& x, std::size_t driver_dim) const {
    if (dx) return dx(ti, x);
    return Mat::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(driver_dim));
}

FieldFunction time_independent_field(std::size_t in_dim, std::size_t out_dim,
                                     std::function<Vec(const Vec&)> eval,
                                     std::function<Mat(const Vec&)> jac) {
    FieldFunction f;
    f.in_dim = in_dim;
    f.out_dim = out_dim;
    f.eval = [e = std::move(eval)](std::size_t, const Vec& x) { return e(x); };
    if (jac)
        f.jac = [j = std::move(jac)](std::size_t, const Vec& x) { return j(x); };
    else
        f.fd_jacobian = true;
    return f;
}

ControlledPath compose_chain_rule(const FieldFunction& f, const ControlledPath& z) {
    require(f.eval != nullptr, "field needs an eval callable");
    require(f.in_dim == z.dim(), "field input dimension must match the path");
    const auto& p = z.driver();
    const std::size_t pts = p.grid().n_points();
    Mat values(pts, static_cast<Eigen::Index>(f.out_dim));
    std::vector<Mat> gub(pts);
    for (std::size_t i = 0; i < pts; ++i) {
        const Vec x = z.value(i);
        values.row(static_cast<Eigen::Index>(i)) = f.eval(i, x).transpose();
        gub[i] = f.gubinelli(i, x, p.dim()) + f.jacobian(i, x) * z.derivative(i);
    }
    return ControlledPath(p, std::move(values), std::move(gub));
}

}  // namespace roughw
