#pragma once

#include "roughw/rough_path.hpp"
#include "roughw/controlled.hpp"

namespace roughw::rde {

// Autonomous coefficient field f: R^m -> R^{m x d} with its state derivative
// as one m x d slice per state direction. fd_jacobian marks slices produced by
// central differences rather than an analytic callable.
struct VectorField {
    std::size_t state_dim = 1;
    std::size_t driver_dim = 1;
    std::function<Mat(const Vec&)> f;
    std::function<std::vector<Mat>(const Vec&)> Df;
    bool fd_jacobian = false;
};

VectorField zero_field(std::size_t m, std::size_t d);
VectorField constant_field(Mat c);
// Scalar state, f(y) = lambda * y * (1, ..., 1); the classic growth equation.
VectorField linear_field(double lambda, std::size_t d);
// Fills in Df by central differences at step 1e-6 * (1 + |y|).
VectorField with_fd_jacobian(VectorField field);

// Largest relative error of Df against central differences over `count` seeded
// sample points drawn uniformly from [-box, box]^m.
double validate_jacobian(const VectorField& field, double box, std::size_t count,
                         std::uint64_t seed);

// One-step scheme  y <- y + f(y) X_{uv} + sum_k Df_k(y) (XX_{uv}^T f(y)_k),
// the compensated local expansion of the rough integral; exact (telescoping)
// for constant fields. The returned path carries f(y_i) as its derivative.
// Throws divergence_error naming the step when the state leaves the finite
// range. Arithmetic is explicit loops in a fixed order so enlarging the system
// by decoupled components reproduces the shared rows bit for bit.
ControlledPath solve_rde(const VectorField& field, const Vec& y0, const RoughPath& p);

// Flow of a scalar-state field over a uniform grid of start points, with space
// derivatives by central differences (one-sided second-order at the edges) and
// 4-point polynomial interpolation for off-grid queries.
struct FlowResult {
    Vec x_grid;
    double x_step = 0.0;
    Mat y;    // (N+1) x P, column per start point; row 0 is the grid itself
    Mat dy;   // same shape, d/dx
    Mat d2y;  // same shape, d^2/dx^2

    double value(std::size_t ti, double x) const;
    double deriv(std::size_t ti, double x) const;
    double second(std::size_t ti, double x) const;
};

FlowResult solve_flow(const VectorField& field, const RoughPath& p, const Vec& x_grid);

// Composition V_t = Y_t(Z_t(x)) of the g-flow with the f-flow, against the
// right side assembled from the flow outputs:
//   dX integrand      g(V) + DY(Z) f(Z)
//   bracket integrand Dg(V) DY(Z) f(Z) + 1/2 D2Y(Z) f(Z)^2,
// with the integrand's Gubinelli derivative from the chain and product rules.
// residual_geometric drops the bracket part (the weak geometric special case).
struct FlowCompositionReport {
    Vec lhs;            // interpolated composition
    Vec rhs;            // full assembly
    double residual_max = 0.0;
    double residual_geometric_max = 0.0;
    double scale = 1.0;
};

FlowCompositionReport flow_composition_residual(const VectorField& g_field,
                                                const VectorField& f_field, const RoughPath& p,
                                                double x, double x_step = 2e-3);

// Mesh ladder of the composition residual over stride restrictions of p;
// target slope -(3 alpha - 1).
ConvergenceReport flow_composition_ladder(const VectorField& g_field, const VectorField& f_field,
                                          const RoughPath& p, double x, std::size_t levels,
                                          double x_step = 2e-3);

}  // namespace roughw::rde
