#pragma once

#include <random>

#include "roughw/rough_path.hpp"

namespace roughw::lifts {

// Deterministic standard normals. std::normal_distribution is implementation
// defined, so draws use mt19937_64 (bit-exact everywhere) plus an explicit
// Box-Muller transform: two 53-bit uniforms per normal,
//     z = sqrt(-2 ln u1) * cos(2 pi u2),   u1 in (0, 1],  u2 in [0, 1).
// Consumers draw in time order with the coordinate index innermost.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::mt19937_64 rng_;
};

enum class LiftKind { piecewise_linear, brownian_ito, pure_area, smooth };

// Everything needed to rebuild a lift bit-for-bit. `sample` names the built-in
// level-1 generator for piecewise_linear / smooth kinds ("circle", "line",
// "tt2"); `subsample` is the fine-steps-per-cell factor M for brownian_ito.
struct LiftSpec {
    LiftKind kind = LiftKind::piecewise_linear;
    std::size_t dim = 1;
    std::size_t n = 256;
    double horizon = 1.0;
    double alpha = 0.45;
    std::uint64_t seed = 0;
    std::size_t subsample = 4;
    std::string sample = "line";
    Mat area;  // pure_area only; antisymmetric d x d
};

// Piecewise-linear lift of level-1 samples: each cell carries the exact chord
// tensor inc (x) inc / 2, so the bracket vanishes identically.
RoughPath lift_piecewise_linear(const TimeGrid& grid, const Mat& samples, double alpha);

// Ito-normalized Brownian lift. Coarse increments are drawn first; when m > 1
// each cell is refined by m conditioned fine increments (iid N(0, dt/m),
// recentred to sum to the coarse increment) with fine values anchored at the
// coarse knots, so the coarse level-1 path is bit-identical for every m. The
// level 2 is the piecewise-linear one of the fine path, coarsened, minus
// dt/2 * I per cell; the bracket is therefore exactly (t_j - t_i) * I.
RoughPath lift_brownian_ito(std::uint64_t seed, std::size_t dim, std::size_t n, double horizon,
                            std::size_t m, double alpha);

// X = 0 with XX_{st} = (t - s) * a for antisymmetric a.
RoughPath lift_pure_area(const Mat& area, std::size_t n, double horizon, double alpha);

// Lift of a C^1 curve f: values f(t_i), each cell's tensor by 5-point
// Gauss-Legendre quadrature of int (f(u) - f(t_i)) (x) f'(u) du.
RoughPath lift_smooth(const std::function<Vec(double)>& f, const std::function<Vec(double)>& fprime,
                      std::size_t dim, std::size_t n, double horizon, double alpha);

RoughPath make_lift(const LiftSpec& spec);

// Built-in level-1 generators for named specs.
Vec sample_curve(const std::string& name, std::size_t dim, double t);
Vec sample_curve_derivative(const std::string& name, std::size_t dim, double t);

}  // namespace roughw::lifts
