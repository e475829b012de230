#pragma once

#include "roughw/integrate.hpp"

namespace roughw::wentzell {

// Space-time coefficient family for a scalar state x and a d-dimensional
// driver. h(t, x) is a row in L(R^d, R) stored as a d-vector; dxh is the
// Gubinelli field of t -> h(t, x) with (a, b) = rate of component b in driver
// direction a; Dh is the x-derivative of each component of h and dxDh its
// Gubinelli field under the same convention. All callables take a grid index,
// never a raw time.
struct FieldFamily {
    std::size_t driver_dim = 1;
    std::function<Vec(std::size_t, double)> h;
    std::function<Mat(std::size_t, double)> dxh;
    std::function<Vec(std::size_t, double)> Dh;
    std::function<Mat(std::size_t, double)> dxDh;

    void check_complete() const;
};

// The evolved field g(t, x) = g(0, x) + int_0^t h(s, x) dX_s together with its
// first two space derivatives along the same grid. fd_second marks a D2g that
// is produced by central differences of Dg instead of an analytic callable.
struct GField {
    std::function<double(std::size_t, double)> g;
    std::function<double(std::size_t, double)> Dg;
    std::function<double(std::size_t, double)> D2g;
    bool analytic_dg = false;
    bool fd_second = false;
};

// Analytic pieces a caller may supply to build_g; anything missing is filled
// in numerically (g by frozen-x running integrals of h plus g0, Dg by
// per-direction integrals of Dh plus Dg0, D2g by central differences of Dg at
// step 1e-4 * (1 + |x|)). Supply g when a closed form exists: the integral
// fallback costs one grid pass per distinct x, which is quadratic when the
// field is evaluated along a path.
struct GFieldInput {
    std::function<double(double)> g0;
    std::function<double(std::size_t, double)> g;
    std::function<double(double)> Dg0;
    std::function<double(std::size_t, double)> Dg;
    std::function<double(std::size_t, double)> D2g;
};

GField build_g(const FieldFamily& fields, const GFieldInput& input, const RoughPath& p,
               const std::vector<double>& points);

// max over grid t of |Dg(t, x) * u - int_0^t Dh(r, x) * u dX_r|, the identity
// that pins the Gubinelli derivative of Dg to Dh. Requires an analytic Dg.
double dg_consistency(const FieldFamily& fields, const GField& g, const RoughPath& p, double x,
                      double u);

struct WentzellReport {
    double alpha = 0.0;
    std::size_t n = 0;
    Vec lhs;               // g(t_i, Z_i)
    Vec term_initial;      // constant g(0, Z_0)
    Vec term_h;            // int h(r, Z_r) dX
    Vec term_dg;           // int Dg(r, Z_r) d_X Z
    Vec term_dh_bracket;   // int Dh o dZ d[X]
    Vec term_d2g_bracket;  // 1/2 int D2g dZ (x) dZ d[X]
    double residual_max = 0.0;
    double scale = 1.0;
};

// Five-term expansion of t -> g(t, Z_t): initial value, the dX integral of
// h(r, Z_r), the d_X Z integral of Dg(r, Z_r), and the two Young integrals
// against the bracket. residual_max is max_t |lhs - sum of terms|.
WentzellReport wentzell_residual(const FieldFamily& fields, const GField& g,
                                 const ControlledPath& z, const RoughPath& p);

// Two-term form for weakly geometric drivers; the bracket terms are left at
// zero. Throws precondition_error when the driver's bracket does not vanish.
WentzellReport wentzell_stratonovich(const FieldFamily& fields, const GField& g,
                                     const ControlledPath& z, const RoughPath& p);

// State built internally as Z_t = z0 + int a dX + int b d[X] with dZ = a; the
// expansion collapses to one dX integrand h + Dg a and one bracket integrand
// Dg b + Dh o a + 1/2 D2g a (x) a.
WentzellReport keller_zhang_residual(const FieldFamily& fields, const GField& g,
                                     const RowControlledPath& a, const std::vector<Mat>& b,
                                     double z0, const RoughPath& p);

// Assembles the full-form right side on the plain driver and the two-term
// right side on the geometrized companion, and returns the maximal gap after
// adding the 1/2 int dxh d[X] correction that converts one into the other.
integrate::ConversionCheck strato_reconciliation(const FieldFamily& fields, const GField& g,
                                                 const ControlledPath& z, const RoughPath& p);

// Per-pair Taylor-defect sweeps over dyadic intervals:
//   a1: 1/2 D2g(t,Z_s) Z_st^2 vs the second-level + bracket split,
//   a2: Dg(t,Z_s) Z_st vs the frozen-time value + the (Dh o dZ) X (x) X term,
// each with a one-sided slope test at 3 alpha; com is the transpose identity
// (dxDg . dZ) XX = (Dh o dZ) XX^T checked pairwise against an absolute bound.
struct PairSweepReport {
    ConvergenceReport a1;
    ConvergenceReport a2;
    double com_max = 0.0;
    double com_scale = 1.0;
    bool com_pass = false;
};

PairSweepReport appendix_identity_checks(const FieldFamily& fields, const GField& g,
                                         const ControlledPath& z, const RoughPath& p,
                                         std::size_t levels = 5);

}  // namespace roughw::wentzell
