#pragma once

#include "roughw/controlled.hpp"

namespace roughw::integrate {

// Running integral started at zero, together with the dyadic sewing-defect
// table: for each aligned block size L, the largest |S_{i+L} - S_i -
// germ(i, i+L)| over starts i that are multiples of L. The germ of a block is
// the one-step compensated sum over it, so the table exposes the local error
// law without a reference mesh.
struct IntegralResult {
    ControlledPath path;
    std::vector<std::pair<std::size_t, double>> defects;
};

// int Y dX as the limit of sum Y_u X_{uv} + G_u . XX_{uv}, with G the
// Gubinelli derivative of Y and . the full d x d contraction. The result is
// controlled with derivative Y itself. kahan switches the accumulator to
// compensated summation; plain left-to-right is the default so runs are
// bit-reproducible across flag-identical builds.
IntegralResult rough_integral(const RowControlledPath& y, bool kahan = false);

// int Y d_X Z for scalar Y against an m-valued controlled Z:
// sum Y_u Z_{uv} + dZ_u (XX_{uv}^T dY_u); result controlled with derivative
// Y_t dZ_t.
IntegralResult controlled_integral(const ControlledPath& y, const ControlledPath& z,
                                   bool kahan = false);

// Left-endpoint Young sums of a d x d coefficient path against the bracket.
Vec young_bracket_integral(const std::vector<Mat>& coeff, const RoughPath& p);

// Compensated-sum defect of the coarse germ over [i, j] against the fine-mesh
// running integral (fine refines coarse by `stride`).
double local_defect(const RowControlledPath& coarse, const RowControlledPath& fine,
                    std::size_t stride, std::size_t i, std::size_t j);

// Dyadic-interval ladder of local defects, slope fitted against interval
// length; target slope 3 alpha.
ConvergenceReport defect_ladder(const RowControlledPath& coarse, const RowControlledPath& fine,
                                std::size_t stride, double alpha, std::size_t levels);

double local_defect_controlled(const ControlledPath& yc, const ControlledPath& zc,
                               const ControlledPath& yf, const ControlledPath& zf,
                               std::size_t stride, std::size_t i, std::size_t j);

ConvergenceReport defect_ladder_controlled(const ControlledPath& yc, const ControlledPath& zc,
                                           const ControlledPath& yf, const ControlledPath& zf,
                                           std::size_t stride, double alpha, std::size_t levels);

// max_t | int_0^t Y dX~  -  int_0^t Y dX  -  1/2 int_0^t G d[X] | for the
// geometrized companion X~; identically zero in exact arithmetic because the
// geometrization adds [X]/2 to each cell tensor and the Young sum uses the
// same left endpoints. Reported against scale = 1 + sup |int Y dX|.
struct ConversionCheck {
    double residual_max = 0.0;
    double scale = 1.0;
};

ConversionCheck ito_strato_check_path(const RowControlledPath& y);

ConversionCheck ito_strato_check_controlled(const ControlledPath& y, const ControlledPath& z);

}  // namespace roughw::integrate
