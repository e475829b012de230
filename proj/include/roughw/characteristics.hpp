#pragma once

#include "roughw/rde.hpp"

namespace roughw::characteristics {

// Transport data for  du = sum_j (D_x u . P^j(x) + Q^j(x, u)) dX^j  with
// initial datum phi. One entry per driver direction j. The spatial window and
// grid size control the start grid used when the solution is assembled by
// characteristics.
struct SemilinearSpec {
    std::size_t dim = 1;     // spatial dimension d
    std::size_t driver = 1;  // driver dimension
    std::vector<std::function<Vec(const Vec&)>> P;
    std::vector<std::function<Mat(const Vec&)>> DP;              // d x d Jacobian
    std::vector<std::function<double(const Vec&, double)>> Q;    // (x, u)
    std::vector<std::function<Vec(const Vec&, double)>> Qx;
    std::vector<std::function<double(const Vec&, double)>> Qu;
    std::function<double(const Vec&)> phi;
    std::function<Vec(const Vec&)> Dphi;
    double x_lo = -1.0;
    double x_hi = 1.0;
    std::size_t grid_n = 200;  // start-grid resolution over [x_lo, x_hi]
};

void check_spec(const SemilinearSpec& spec);

// Coefficient field of the (d+1)-dimensional pair (a, b):
//   da = -sum_j P^j(a) dX^j,   db = sum_j Q^j(a, b) dX^j.
rde::VectorField semilinear_field(const SemilinearSpec& spec);

// (a, b) started from (y, phi(y)). State layout: components 0..d-1 = a, d = b.
ControlledPath solve_characteristics(const SemilinearSpec& spec, const Vec& y,
                                     const RoughPath& p);

// First-order data F^j(x, u, p) with its partials. Fb optionally supplies the
// reduced form of F - F_p . c when it simplifies exactly (the semilinear case),
// so the shared rows of the enlarged system repeat the same arithmetic. Df
// optionally overrides the state derivative of the assembled field; without it
// the a and b rows are differentiated via Fp/Fx/Fu-free central differences.
struct FullSpec {
    std::size_t dim = 1;
    std::size_t driver = 1;
    std::vector<std::function<double(const Vec&, double, const Vec&)>> F;
    std::vector<std::function<Vec(const Vec&, double, const Vec&)>> Fp;
    std::vector<std::function<Vec(const Vec&, double, const Vec&)>> Fx;
    std::vector<std::function<double(const Vec&, double, const Vec&)>> Fu;
    std::vector<std::function<double(const Vec&, double, const Vec&)>> Fb;
    std::function<std::vector<Mat>(const Vec&)> Df;
    std::function<double(const Vec&)> phi;
    std::function<Vec(const Vec&)> Dphi;
};

// Coefficient field of the (2d+1)-dimensional triple (a, b, c):
//   da = -sum_j F_p^j dX^j
//   db =  sum_j (F^j - F_p^j . c) dX^j
//   dc =  sum_j (F_x^j + F_u^j c) dX^j.
// State layout: 0..d-1 = a, d = b, d+1..2d = c.
rde::VectorField full_field(const FullSpec& spec);

// Triple started from (y, phi(y), Dphi(y)).
ControlledPath solve_full_characteristics(const FullSpec& spec, const Vec& y,
                                          const RoughPath& p);

// Semilinear data as first-order data: F^j = P^j . p + Q^j, so F_p^j = P^j and
// F^j - F_p^j . c = Q^j; the a and b rows of the enlarged system reuse the
// spec's callables directly and reproduce solve_characteristics bit for bit.
// Spatial second derivatives enter only through the c rows' state derivative
// and are taken by central differences there.
FullSpec full_from_semilinear(const SemilinearSpec& spec);

struct InversionResult {
    double preimage = 0.0;
    double cell_width = 0.0;  // width of the bracketing start-grid cell
    double cell_slope = 1.0;  // dy/da over that cell
    bool increasing = true;
};

// Preimage of x under the sampled map ys[k] -> as[k]: strict monotonicity is
// checked, the bracketing cell found by bisection, and the preimage linearly
// interpolated inside it. The reported bound is the cell width in y.
InversionResult invert_a(const Vec& ys, const Vec& as, double x);

struct TransportSlice {
    Vec u;
    Vec inversion_residual;  // |a_t(y*) - x| after refinement, per point
};

// Characteristics of one driver solved over a start grid once, then queried by
// inversion: u(t, x) = b_t(a_t^{-1}(x)). Each query re-runs one characteristic
// from the interpolated preimage (with one slope-correction pass when needed),
// so u values come from a genuine characteristic rather than table lookup.
class TransportSolver {
  public:
    TransportSolver(SemilinearSpec spec, const RoughPath& p);

    TransportSlice slice(std::size_t t_index, const Vec& x_points) const;
    // u over every grid time (rows) for each x (columns)
    Mat path(const Vec& x_points) const;

    const Vec& starts() const { return starts_; }
    const Mat& a_table() const { return a_; }
    const Mat& b_table() const { return b_; }
    const RoughPath& driver() const { return *driver_; }
    const SemilinearSpec& spec() const { return spec_; }

    // single point: returns {u(t, x), inversion residual |a_t(y*) - x|}
    std::pair<double, double> query(std::size_t t_index, double x) const;

  private:
    SemilinearSpec spec_;
    const RoughPath* driver_;
    Vec starts_;
    Mat a_;  // (N+1) x P
    Mat b_;  // (N+1) x P
};

// One-call form of the Thm backing it: u(t, .) at one grid time.
TransportSlice solve_semilinear(const SemilinearSpec& spec, const RoughPath& p,
                                std::size_t t_index, const Vec& x_points);

// Along full characteristics from a few interior starts, compare b_t with
// u(t, a_t) and c_t with a central-difference D_x u(t, a_t) at subsampled
// times. fd_step is the spatial step of that difference.
struct StructureReport {
    double b_discrepancy = 0.0;
    double c_discrepancy = 0.0;
    std::size_t points = 0;
};

StructureReport structure_check(const SemilinearSpec& spec, const RoughPath& p,
                                std::size_t time_samples = 16, double fd_step = 1e-2);

// Residual of the transport equation itself at probe points x:
//   u(t, x) - phi(x) - running rough integral of (D_x u . P^j + Q^j),
// with D_x u and the integrand's space derivative from 5-point stencils of
// half-width fd_step. Max over grid times and probes.
struct PdeResidualReport {
    double residual_max = 0.0;
    double scale = 1.0;
};

PdeResidualReport pde_residual(const SemilinearSpec& spec, const RoughPath& p,
                               const Vec& x_probes, double fd_step = 1e-2);

// Ladder of pde_residual over stride restrictions of p; the abscissa is the
// mesh size, target slope 3 alpha - 1.
ConvergenceReport pde_residual_ladder(const SemilinearSpec& spec, const RoughPath& p,
                                      const Vec& x_probes, std::size_t levels,
                                      double fd_step = 1e-2);

// Built-in transport scenarios:
//   translate: P = 0.7 constant, Q = 0, phi(x) = x^2 (closed form
//              u(t,x) = (x + 0.7 X_t)^2, exact characteristics)
//   linear:    P(x) = x, Q = 0, phi(x) = x (closed form u(t,x) = x e^{X_t}
//              on weak geometric drivers)
SemilinearSpec transport_scenario(const std::string& name, std::size_t driver_dim = 1);

}  // namespace roughw::characteristics
