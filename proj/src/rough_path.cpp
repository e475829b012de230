#include "roughw/rough_path.hpp"

#include <atomic>
#include <cmath>

namespace roughw {

HoelderReport hoelder_norms(const RoughPath& p, double alpha, bool adjacent_only) {
    require_alpha(alpha);
    HoelderReport rep;
    rep.alpha = alpha;
    rep.adjacent_only = adjacent_only;
    rep.norm_x_sup = p.sup_norm();

    const std::size_t n = p.n_steps();
    const auto pair_max = [&](std::size_t i, std::size_t j, HoelderReport& acc) {
        const double dt = p.grid().dt(i, j);
        const double da = std::pow(dt, alpha);
        const double d2a = da * da;
        acc.norm_x_alpha = std::max(acc.norm_x_alpha, p.increment(i, j).norm() / da);
        acc.norm_xx_2alpha = std::max(acc.norm_xx_2alpha, p.second_level(i, j).norm() / d2a);
        acc.bracket_2alpha = std::max(acc.bracket_2alpha, p.bracket(i, j).norm() / d2a);
    };

    if (adjacent_only) {
        for (std::size_t i = 0; i < n; ++i) pair_max(i, i + 1, rep);
        return rep;
    }

    std::vector<HoelderReport> rows(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j <= n; ++j) pair_max(i, j, rows[i]);
    });
    for (const auto& acc : rows) {
        rep.norm_x_alpha = std::max(rep.norm_x_alpha, acc.norm_x_alpha);
        rep.norm_xx_2alpha = std::max(rep.norm_xx_2alpha, acc.norm_xx_2alpha);
        rep.bracket_2alpha = std::max(rep.bracket_2alpha, acc.bracket_2alpha);
    }
    return rep;
}

RoughPath geometrize(const RoughPath& p) {
    std::vector<Mat> cum2 = p.cum2();
    for (std::size_t i = 0; i <= p.n_steps(); ++i) cum2[i] += 0.5 * p.bracket(0, i);
    return RoughPath(p.grid(), p.values(), std::move(cum2), p.alpha());
}

double rough_distance(const RoughPath& p, const RoughPath& q, double alpha) {
    require_alpha(alpha);
    require(p.grid().same_as(q.grid()), "rough_distance needs a shared grid");
    require(p.dim() == q.dim(), "rough_distance needs matching dimensions");
    const std::size_t n = p.n_steps();
    double lvl1 = 0.0, lvl2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            const double dt = p.grid().dt(i, j);
            const double da = std::pow(dt, alpha);
            lvl1 = std::max(lvl1, (p.increment(i, j) - q.increment(i, j)).norm() / da);
            lvl2 = std::max(lvl2, (p.second_level(i, j) - q.second_level(i, j)).norm() / (da * da));
        }
    }
    return lvl1 + lvl2;
}

RoughPath subinterval(const RoughPath& p, std::size_t i0, std::size_t i1) {
    p.grid().check(i0);
    p.grid().check(i1);
    require(i0 < i1, "subinterval needs i0 < i1");
    const std::size_t m = i1 - i0;
    Vec times(m + 1);
    Mat values(m + 1, p.dim());
    std::vector<Mat> cum2(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        times[static_cast<Eigen::Index>(k)] = p.grid().time(i0 + k) - p.grid().time(i0);
        values.row(static_cast<Eigen::Index>(k)) =
            p.values().row(static_cast<Eigen::Index>(i0 + k));
        cum2[k] = p.second_level(i0, i0 + k);
    }
    times[0] = 0.0;
    return RoughPath(TimeGrid(std::move(times)), std::move(values), std::move(cum2), p.alpha());
}

RoughPath restrict_stride(const RoughPath& p, std::size_t stride) {
    TimeGrid sub = p.grid().restrict_stride(stride);
    const std::size_t m = sub.n_steps();
    Mat values(m + 1, p.dim());
    std::vector<Mat> cum2(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        values.row(static_cast<Eigen::Index>(i)) =
            p.values().row(static_cast<Eigen::Index>(i * stride));
        cum2[i] = p.cum2()[i * stride];
    }
    return RoughPath(std::move(sub), std::move(values), std::move(cum2), p.alpha());
}

}  // namespace roughw
