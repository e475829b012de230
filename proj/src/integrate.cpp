#include "roughw/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace roughw::integrate {

namespace {

struct KahanVec {
    explicit KahanVec(Eigen::Index m) : sum(Vec::Zero(m)), carry(Vec::Zero(m)) {}
    void add(const Vec& v) {
        const Vec y = v - carry;
        const Vec t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    Vec sum, carry;
};

double contract(const Mat& coeff, const Mat& tensor) {
    return (coeff.array() * tensor.array()).sum();
}

Vec rough_germ(const RowControlledPath& y, std::size_t i, std::size_t j) {
    const RoughPath& p = y.driver();
    Vec g(1);
    g[0] = y.value(i).dot(p.increment(i, j)) + contract(y.derivative(i), p.second_level(i, j));
    return g;
}

Vec controlled_germ(const ControlledPath& y, const ControlledPath& z, std::size_t i,
                    std::size_t j) {
    const RoughPath& p = y.driver();
    const double yi = y.value(i)[0];
    const Vec dy = y.derivative(i).row(0).transpose();
    return yi * z.increment(i, j) + z.derivative(i) * (p.second_level(i, j).transpose() * dy);
}

template <typename Germ>
Mat accumulate(const RoughPath& p, Eigen::Index m, bool kahan, Germ&& germ) {
    const std::size_t n = p.n_steps();
    Mat out = Mat::Zero(static_cast<Eigen::Index>(n + 1), m);
    if (kahan) {
        KahanVec acc(m);
        for (std::size_t i = 0; i < n; ++i) {
            acc.add(germ(i, i + 1));
            out.row(static_cast<Eigen::Index>(i + 1)) = acc.sum.transpose();
        }
    } else {
        Vec acc = Vec::Zero(m);
        for (std::size_t i = 0; i < n; ++i) {
            acc += germ(i, i + 1);
            out.row(static_cast<Eigen::Index>(i + 1)) = acc.transpose();
        }
    }
    return out;
}

template <typename Germ>
std::vector<std::pair<std::size_t, double>> dyadic_defects(const Mat& running, std::size_t n,
                                                           Germ&& germ) {
    std::vector<std::pair<std::size_t, double>> table;
    for (std::size_t block = 2; block <= n; block *= 2) {
        if (n % block != 0) break;
        double worst = 0.0;
        for (std::size_t i = 0; i + block <= n; i += block) {
            const Vec diff = (running.row(static_cast<Eigen::Index>(i + block)) -
                              running.row(static_cast<Eigen::Index>(i)))
                                 .transpose() -
                             germ(i, i + block);
            worst = std::max(worst, diff.norm());
        }
        table.emplace_back(block, worst);
    }
    return table;
}

}  // namespace

IntegralResult rough_integral(const RowControlledPath& y, bool kahan) {
    const RoughPath& p = y.driver();
    const auto germ = [&](std::size_t i, std::size_t j) { return rough_germ(y, i, j); };
    Mat running = accumulate(p, 1, kahan, germ);
    auto defects = dyadic_defects(running, p.n_steps(), germ);
    std::vector<Mat> gub(p.grid().n_points());
    for (std::size_t i = 0; i < p.grid().n_points(); ++i)
        gub[i] = y.values().row(static_cast<Eigen::Index>(i));
    return {ControlledPath(p, std::move(running), std::move(gub)), std::move(defects)};
}

IntegralResult controlled_integral(const ControlledPath& y, const ControlledPath& z, bool kahan) {
    require(y.dim() == 1, "controlled integrand must be scalar");
    require(&y.driver() == &z.driver(), "integrand and integrator must share a driver");
    const RoughPath& p = y.driver();
    const auto m = static_cast<Eigen::Index>(z.dim());
    const auto germ = [&](std::size_t i, std::size_t j) { return controlled_germ(y, z, i, j); };
    Mat running = accumulate(p, m, kahan, germ);
    auto defects = dyadic_defects(running, p.n_steps(), germ);
    std::vector<Mat> gub(p.grid().n_points());
    for (std::size_t i = 0; i < p.grid().n_points(); ++i)
        gub[i] = y.value(i)[0] * z.derivative(i);
    return {ControlledPath(p, std::move(running), std::move(gub)), std::move(defects)};
}

Vec young_bracket_integral(const std::vector<Mat>& coeff, const RoughPath& p) {
    require(coeff.size() == p.grid().n_points(), "coefficient path must match the grid");
    const std::size_t n = p.n_steps();
    Vec out = Vec::Zero(static_cast<Eigen::Index>(n + 1));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += contract(coeff[i], p.bracket(i, i + 1));
        out[static_cast<Eigen::Index>(i + 1)] = acc;
    }
    return out;
}

namespace {

void check_refinement(const RoughPath& coarse, const RoughPath& fine, std::size_t stride) {
    require(stride >= 1 && fine.n_steps() == coarse.n_steps() * stride,
            "fine grid must refine the coarse grid by the stated stride");
    for (std::size_t i = 0; i <= coarse.n_steps(); ++i)
        require(coarse.grid().time(i) == fine.grid().time(i * stride),
                "fine grid must contain the coarse grid points");
}

template <typename FineGerm>
double fine_block_sum(FineGerm&& germ, std::size_t i_fine, std::size_t j_fine) {
    double acc = 0.0;
    for (std::size_t k = i_fine; k < j_fine; ++k) acc += germ(k, k + 1)[0];
    return acc;
}

template <typename CoarseGerm, typename FineGerm>
ConvergenceReport generic_defect_ladder(const RoughPath& coarse_driver, std::size_t stride,
                                        double alpha, std::size_t levels, CoarseGerm&& cgerm,
                                        FineGerm&& fgerm, double scale) {
    const std::size_t n = coarse_driver.n_steps();
    std::vector<double> lengths, typical;
    // geometric mean over aligned blocks per dyadic size; the worst block is
    // max-statistic noise on random drivers and would drag the fitted order down
    std::size_t block = n / 8;
    for (std::size_t lvl = 0; lvl < levels && block >= 1; ++lvl, block /= 2) {
        double logsum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i + block <= n; i += block) {
            const double ref = fine_block_sum(fgerm, i * stride, (i + block) * stride);
            const double defect = std::abs(ref - cgerm(i, i + block)[0]);
            logsum += std::log(std::max(defect, 1e-300));
            ++count;
        }
        lengths.push_back(coarse_driver.grid().horizon() * static_cast<double>(block) /
                          static_cast<double>(n));
        typical.push_back(std::exp(logsum / static_cast<double>(count)));
    }
    return fit_ladder("local-defect", alpha, std::move(lengths), std::move(typical), scale,
                      3.0 * alpha, 0.3);
}

}  // namespace

double local_defect(const RowControlledPath& coarse, const RowControlledPath& fine,
                    std::size_t stride, std::size_t i, std::size_t j) {
    check_refinement(coarse.driver(), fine.driver(), stride);
    require(i < j && j <= coarse.n_steps(), "defect interval out of range");
    const double ref = fine_block_sum(
        [&](std::size_t a, std::size_t b) { return rough_germ(fine, a, b); }, i * stride,
        j * stride);
    return std::abs(ref - rough_germ(coarse, i, j)[0]);
}

ConvergenceReport defect_ladder(const RowControlledPath& coarse, const RowControlledPath& fine,
                                std::size_t stride, double alpha, std::size_t levels) {
    check_refinement(coarse.driver(), fine.driver(), stride);
    const double scale = 1.0 + coarse.values().cwiseAbs().maxCoeff();
    return generic_defect_ladder(
        coarse.driver(), stride, alpha, levels,
        [&](std::size_t a, std::size_t b) { return rough_germ(coarse, a, b); },
        [&](std::size_t a, std::size_t b) { return rough_germ(fine, a, b); }, scale);
}

double local_defect_controlled(const ControlledPath& yc, const ControlledPath& zc,
                               const ControlledPath& yf, const ControlledPath& zf,
                               std::size_t stride, std::size_t i, std::size_t j) {
    check_refinement(yc.driver(), yf.driver(), stride);
    require(zc.dim() == 1 && zf.dim() == 1, "defect ladder uses scalar integrators");
    const double ref = fine_block_sum(
        [&](std::size_t a, std::size_t b) { return controlled_germ(yf, zf, a, b); }, i * stride,
        j * stride);
    return std::abs(ref - controlled_germ(yc, zc, i, j)[0]);
}

ConvergenceReport defect_ladder_controlled(const ControlledPath& yc, const ControlledPath& zc,
                                           const ControlledPath& yf, const ControlledPath& zf,
                                           std::size_t stride, double alpha, std::size_t levels) {
    check_refinement(yc.driver(), yf.driver(), stride);
    require(zc.dim() == 1 && zf.dim() == 1, "defect ladder uses scalar integrators");
    const double scale = 1.0 + yc.values().cwiseAbs().maxCoeff();
    return generic_defect_ladder(
        yc.driver(), stride, alpha, levels,
        [&](std::size_t a, std::size_t b) { return controlled_germ(yc, zc, a, b); },
        [&](std::size_t a, std::size_t b) { return controlled_germ(yf, zf, a, b); }, scale);
}

ConversionCheck ito_strato_check_path(const RowControlledPath& y) {
    const RoughPath& p = y.driver();
    const RoughPath geo = geometrize(p);
    const RowControlledPath y_geo(geo, y.values(), y.gubinelli());
    const Mat plain = rough_integral(y).path.values();
    const Mat strato = rough_integral(y_geo).path.values();
    const Vec correction = young_bracket_integral(y.gubinelli(), p);
    ConversionCheck out;
    out.scale = 1.0 + plain.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i <= p.n_steps(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        out.residual_max = std::max(out.residual_max,
                                    std::abs(strato(idx, 0) - plain(idx, 0) - 0.5 * correction[idx]));
    }
    return out;
}

ConversionCheck ito_strato_check_controlled(const ControlledPath& y, const ControlledPath& z) {
    require(y.dim() == 1, "conversion check uses a scalar integrand");
    require(&y.driver() == &z.driver(), "paths must share a driver");
    const RoughPath& p = y.driver();
    const RoughPath geo = geometrize(p);
    const ControlledPath y_geo(geo, y.values(), y.gubinelli());
    const ControlledPath z_geo(geo, z.values(), z.gubinelli());
    const Mat plain = controlled_integral(y, z).path.values();
    const Mat strato = controlled_integral(y_geo, z_geo).path.values();

    // 1/2 int (dY . dZ) d[X] componentwise: coefficient tensor dY^T (x) dZ row.
    const std::size_t n = p.n_steps();
    Mat correction = Mat::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(z.dim()));
    Vec acc = Vec::Zero(static_cast<Eigen::Index>(z.dim()));
    for (std::size_t i = 0; i < n; ++i) {
        const Vec dy = y.derivative(i).row(0).transpose();
        acc += z.derivative(i) * (p.bracket(i, i + 1).transpose() * dy);
        correction.row(static_cast<Eigen::Index>(i + 1)) = acc.transpose();
    }
    ConversionCheck out;
    out.scale = 1.0 + plain.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i <= n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const Vec r = (strato.row(idx) - plain.row(idx) - 0.5 * correction.row(idx)).transpose();
        out.residual_max = std::max(out.residual_max, r.norm());
    }
    return out;
}

}  // namespace roughw::integrate
