#include "roughw/wentzell.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace roughw::wentzell {

using integrate::rough_integral;
using integrate::controlled_integral;
using integrate::young_bracket_integral;

void FieldFamily::check_complete() const {
    require(static_cast<bool>(h) && static_cast<bool>(dxh) && static_cast<bool>(Dh) &&
                static_cast<bool>(dxDh),
            "field family needs h, dxh, Dh and dxDh callables");
}

namespace {

ControlledPath rebind(const ControlledPath& z, const RoughPath& p) {
    require(z.driver().grid().same_as(p.grid()), "state path and driver must share a grid");
    require(z.dim() == 1, "state path must be scalar");
    return ControlledPath(p, z.values(), z.gubinelli());
}

// Running integral of t -> h(t, x) for a fixed x, one vector per grid point.
Vec integrate_field(const std::function<Vec(std::size_t, double)>& field,
                    const std::function<Mat(std::size_t, double)>& gub, const RoughPath& p,
                    double x) {
    const std::size_t n = p.n_steps();
    const auto d = static_cast<Eigen::Index>(p.dim());
    Mat vals(n + 1, d);
    std::vector<Mat> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vals.row(static_cast<Eigen::Index>(i)) = field(i, x).transpose();
        g[i] = gub(i, x);
    }
    return rough_integral(RowControlledPath(p, std::move(vals), std::move(g))).path.values().col(0);
}

}  // namespace

GField build_g(const FieldFamily& fields, const GFieldInput& input, const RoughPath& p,
               const std::vector<double>& points) {
    fields.check_complete();
    require(static_cast<bool>(input.g0), "build_g needs the initial field g0");
    require(!points.empty(), "build_g needs a nonempty point set");
    require(fields.driver_dim == p.dim(), "field family and driver dimensions must match");

    for (double x : points) {
        for (std::size_t i = 0; i <= p.n_steps(); ++i) {
            require(fields.h(i, x).allFinite() && fields.dxh(i, x).allFinite(),
                    "h must be finite on the grid at every requested point");
        }
    }

    const RoughPath* pp = &p;
    auto g0 = input.g0;
    GField out;
    if (input.g) {
        out.g = input.g;
    } else {
        auto cache = std::make_shared<std::map<double, Vec>>();
        auto h_running = [fields, pp, cache](double x) -> const Vec& {
            auto it = cache->find(x);
            if (it == cache->end())
                it = cache->emplace(x, integrate_field(fields.h, fields.dxh, *pp, x)).first;
            return it->second;
        };
        for (double x : points) h_running(x);
        out.g = [g0, h_running](std::size_t ti, double x) {
            return g0(x) + h_running(x)[static_cast<Eigen::Index>(ti)];
        };
    }

    if (input.Dg) {
        out.Dg = input.Dg;
        out.analytic_dg = true;
    } else {
        std::function<double(double)> dg0 = input.Dg0;
        if (!dg0)
            dg0 = [g0](double x) {
                const double step = 1e-5 * (1.0 + std::abs(x));
                return (g0(x + step) - g0(x - step)) / (2.0 * step);
            };
        auto dh_cache = std::make_shared<std::map<double, Vec>>();
        auto dh_running = [fields, pp, dh_cache](double x) -> const Vec& {
            auto it = dh_cache->find(x);
            if (it == dh_cache->end())
                it = dh_cache->emplace(x, integrate_field(fields.Dh, fields.dxDh, *pp, x)).first;
            return it->second;
        };
        out.Dg = [dg0, dh_running](std::size_t ti, double x) {
            return dg0(x) + dh_running(x)[static_cast<Eigen::Index>(ti)];
        };
    }

    if (input.D2g) {
        out.D2g = input.D2g;
    } else {
        auto dg = out.Dg;
        out.D2g = [dg](std::size_t ti, double x) {
            const double step = 1e-4 * (1.0 + std::abs(x));
            return (dg(ti, x + step) - dg(ti, x - step)) / (2.0 * step);
        };
        out.fd_second = true;
    }
    return out;
}

double dg_consistency(const FieldFamily& fields, const GField& g, const RoughPath& p, double x,
                      double u) {
    fields.check_complete();
    require(g.analytic_dg, "dg_consistency needs an analytic Dg");
    const std::size_t n = p.n_steps();
    const auto d = static_cast<Eigen::Index>(p.dim());
    Mat vals(n + 1, d);
    std::vector<Mat> gub(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vals.row(static_cast<Eigen::Index>(i)) = u * fields.Dh(i, x).transpose();
        gub[i] = u * fields.dxDh(i, x);
    }
    const Vec run =
        rough_integral(RowControlledPath(p, std::move(vals), std::move(gub))).path.values().col(0);
    double worst = 0.0;
    const double dg0u = g.Dg(0, x) * u;
    for (std::size_t i = 0; i <= n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        worst = std::max(worst, std::abs(g.Dg(i, x) * u - dg0u - run[idx]));
    }
    return worst;
}

namespace {

struct Assembled {
    Vec lhs, term_h, term_dg, term_dh, term_d2g;
    double g0z0 = 0.0;
};

Assembled assemble_full(const FieldFamily& fields, const GField& g, const ControlledPath& z,
                        const RoughPath& p, bool bracket_terms) {
    fields.check_complete();
    require(static_cast<bool>(g.g) && static_cast<bool>(g.Dg) && static_cast<bool>(g.D2g),
            "g field needs g, Dg and D2g callables");
    require(fields.driver_dim == p.dim(), "field family and driver dimensions must match");
    const ControlledPath zz = rebind(z, p);
    const std::size_t n = p.n_steps();
    const auto d = static_cast<Eigen::Index>(p.dim());

    Mat eta_vals(n + 1, d);
    std::vector<Mat> eta_gub(n + 1);
    Mat y_vals(n + 1, 1);
    std::vector<Mat> y_gub(n + 1);
    std::vector<Mat> c_dh(n + 1), c_d2g(n + 1);

    Assembled out;
    out.lhs = Vec(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double zi = zz.value(i)[0];
        const Vec dz = zz.derivative(i).row(0).transpose();
        const Vec hv = fields.h(i, zi);
        const Vec dhv = fields.Dh(i, zi);
        const double d2g = g.D2g(i, zi);

        out.lhs[idx] = g.g(i, zi);
        eta_vals.row(idx) = hv.transpose();
        eta_gub[i] = fields.dxh(i, zi) + dz * dhv.transpose();
        y_vals(idx, 0) = g.Dg(i, zi);
        y_gub[i] = (dhv + d2g * dz).transpose();
        c_dh[i] = dz * dhv.transpose();
        c_d2g[i] = 0.5 * d2g * dz * dz.transpose();
    }

    out.g0z0 = g.g(0, zz.value(0)[0]);
    out.term_h =
        rough_integral(RowControlledPath(p, std::move(eta_vals), std::move(eta_gub))).path.values().col(0);
    out.term_dg =
        controlled_integral(ControlledPath(p, std::move(y_vals), std::move(y_gub)), zz).path.values().col(0);
    if (bracket_terms) {
        out.term_dh = young_bracket_integral(c_dh, p);
        out.term_d2g = young_bracket_integral(c_d2g, p);
    } else {
        out.term_dh = Vec::Zero(n + 1);
        out.term_d2g = Vec::Zero(n + 1);
    }
    return out;
}

WentzellReport finish(const Assembled& a, const RoughPath& p) {
    WentzellReport rep;
    rep.alpha = p.alpha();
    rep.n = p.n_steps();
    rep.lhs = a.lhs;
    rep.term_initial = Vec::Constant(a.lhs.size(), a.g0z0);
    rep.term_h = a.term_h;
    rep.term_dg = a.term_dg;
    rep.term_dh_bracket = a.term_dh;
    rep.term_d2g_bracket = a.term_d2g;
    rep.scale = 1.0 + a.lhs.cwiseAbs().maxCoeff();
    rep.residual_max = 0.0;
    for (Eigen::Index i = 0; i < a.lhs.size(); ++i) {
        const double rhs = a.g0z0 + a.term_h[i] + a.term_dg[i] + a.term_dh[i] + a.term_d2g[i];
        rep.residual_max = std::max(rep.residual_max, std::abs(a.lhs[i] - rhs));
    }
    return rep;
}

}  // namespace

WentzellReport wentzell_residual(const FieldFamily& fields, const GField& g,
                                 const ControlledPath& z, const RoughPath& p) {
    return finish(assemble_full(fields, g, z, p, true), p);
}

WentzellReport wentzell_stratonovich(const FieldFamily& fields, const GField& g,
                                     const ControlledPath& z, const RoughPath& p) {
    if (!p.is_weak_geometric())
        throw precondition_error("two-term expansion needs a weakly geometric driver");
    return finish(assemble_full(fields, g, z, p, false), p);
}

WentzellReport keller_zhang_residual(const FieldFamily& fields, const GField& g,
                                     const RowControlledPath& a, const std::vector<Mat>& b,
                                     double z0, const RoughPath& p) {
    fields.check_complete();
    require(&a.driver() == &p, "coefficient a must be controlled by the driver");
    require(b.size() == p.grid().n_points(), "coefficient b must have one tensor per grid point");
    const std::size_t n = p.n_steps();
    const auto d = static_cast<Eigen::Index>(p.dim());
    for (const Mat& m : b)
        require(m.rows() == d && m.cols() == d, "coefficient b tensors must be d x d");

    const Vec ia = rough_integral(a).path.values().col(0);
    const Vec ib = young_bracket_integral(b, p);

    Mat z_vals(n + 1, 1);
    std::vector<Mat> z_gub(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        z_vals(idx, 0) = z0 + ia[idx] + ib[idx];
        z_gub[i] = a.values().row(idx);
    }

    Mat c_vals(n + 1, d);
    std::vector<Mat> c_gub(n + 1);
    std::vector<Mat> br(n + 1);
    Vec lhs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double zi = z_vals(idx, 0);
        const Vec av = a.value(i);
        const Vec hv = fields.h(i, zi);
        const Vec dhv = fields.Dh(i, zi);
        const double dg = g.Dg(i, zi);
        const double d2g = g.D2g(i, zi);

        lhs[idx] = g.g(i, zi);
        c_vals.row(idx) = (hv + dg * av).transpose();
        const Vec r = dhv + d2g * av;
        c_gub[i] = fields.dxh(i, zi) + av * dhv.transpose() + r * av.transpose() +
                   dg * a.derivative(i);
        br[i] = dg * b[i] + av * dhv.transpose() + 0.5 * d2g * av * av.transpose();
    }

    const Vec dx_part =
        rough_integral(RowControlledPath(p, std::move(c_vals), std::move(c_gub))).path.values().col(0);
    const Vec br_part = young_bracket_integral(br, p);

    WentzellReport rep;
    rep.alpha = p.alpha();
    rep.n = n;
    rep.lhs = lhs;
    const double g0z0 = g.g(0, z_vals(0, 0));
    rep.term_initial = Vec::Constant(lhs.size(), g0z0);
    rep.term_h = dx_part;
    rep.term_dg = Vec::Zero(n + 1);
    rep.term_dh_bracket = br_part;
    rep.term_d2g_bracket = Vec::Zero(n + 1);
    rep.scale = 1.0 + lhs.cwiseAbs().maxCoeff();
    rep.residual_max = 0.0;
    for (Eigen::Index i = 0; i < lhs.size(); ++i)
        rep.residual_max =
            std::max(rep.residual_max, std::abs(lhs[i] - (g0z0 + dx_part[i] + br_part[i])));
    return rep;
}

integrate::ConversionCheck strato_reconciliation(const FieldFamily& fields, const GField& g,
                                                 const ControlledPath& z, const RoughPath& p) {
    const RoughPath geo = geometrize(p);
    const Assembled full = assemble_full(fields, g, z, p, true);
    const Assembled two = assemble_full(fields, g, z, geo, false);

    const std::size_t n = p.n_steps();
    std::vector<Mat> cx(n + 1);
    const ControlledPath zz = rebind(z, p);
    for (std::size_t i = 0; i <= n; ++i) cx[i] = fields.dxh(i, zz.value(i)[0]);
    const Vec corr = young_bracket_integral(cx, p);

    integrate::ConversionCheck out;
    double sup = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double rhs_full =
            full.g0z0 + full.term_h[idx] + full.term_dg[idx] + full.term_dh[idx] + full.term_d2g[idx];
        const double rhs_two = two.g0z0 + two.term_h[idx] + two.term_dg[idx];
        out.residual_max =
            std::max(out.residual_max, std::abs(rhs_two - rhs_full - 0.5 * corr[idx]));
        sup = std::max(sup, std::abs(rhs_full));
    }
    out.scale = 1.0 + sup;
    return out;
}

PairSweepReport appendix_identity_checks(const FieldFamily& fields, const GField& g,
                                         const ControlledPath& z, const RoughPath& p,
                                         std::size_t levels) {
    fields.check_complete();
    const ControlledPath zz = rebind(z, p);
    const std::size_t n = p.n_steps();
    require(levels >= 2, "pair sweep needs at least two levels");
    require(n % (std::size_t{1} << (levels - 1)) == 0,
            "step count must be divisible by 2^(levels-1)");

    std::vector<double> lengths, r1, r2;
    PairSweepReport rep;
    double sup1 = 0.0, sup2 = 0.0;
    std::size_t block = n;
    for (std::size_t lvl = 0; lvl < levels; ++lvl, block /= 2) {
        double w1 = 0.0, w2 = 0.0;
        for (std::size_t s = 0; s + block <= n; s += block) {
            const std::size_t t = s + block;
            const double zs = zz.value(s)[0];
            const double zst = zz.value(t)[0] - zs;
            const Vec dz = zz.derivative(s).row(0).transpose();
            const Mat xx = p.second_level(s, t);
            const Mat q = p.bracket(s, t);
            const Vec x = p.increment(s, t);
            const Vec dhv = fields.Dh(s, zs);

            const double lhs1 = 0.5 * g.D2g(t, zs) * zst * zst;
            const double rhs1 = g.D2g(s, zs) * dz.dot(xx * dz) +
                                0.5 * g.D2g(s, zs) * dz.dot(q * dz);
            w1 = std::max(w1, std::abs(lhs1 - rhs1));
            sup1 = std::max(sup1, std::abs(lhs1));

            const double lhs2 = g.Dg(t, zs) * zst;
            const double rhs2 = g.Dg(s, zs) * zst + (dz.dot(x)) * (dhv.dot(x));
            w2 = std::max(w2, std::abs(lhs2 - rhs2));
            sup2 = std::max(sup2, std::abs(lhs2));

            const double com_lhs = dhv.dot(xx * dz);
            const double com_rhs = dz.dot(xx.transpose() * dhv);
            rep.com_max = std::max(rep.com_max, std::abs(com_lhs - com_rhs));
            rep.com_scale =
                std::max(rep.com_scale, 1.0 + dhv.norm() * xx.norm() * dz.norm());
        }
        lengths.push_back(p.grid().horizon() * static_cast<double>(block) /
                          static_cast<double>(n));
        r1.push_back(w1);
        r2.push_back(w2);
    }

    const double target = 3.0 * p.alpha();
    rep.a1 = fit_ladder("taylor-second-order", p.alpha(), lengths, r1, 1.0 + sup1, target, 0.3,
                        true);
    rep.a2 = fit_ladder("taylor-first-order", p.alpha(), std::move(lengths), r2, 1.0 + sup2,
                        target, 0.3, true);
    rep.com_pass = rep.com_max <= 1e-10 * rep.com_scale;
    return rep;
}

}  // namespace roughw::wentzell
