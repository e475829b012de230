#pragma once

#include "roughw/grid.hpp"

namespace roughw {

// Index conventions, used everywhere and nowhere else restated:
//
//   X_{st}      level-1 increment, X_t - X_s, a d-vector.
//   XX_{st}     level-2 tensor, a d x d matrix with
//                   XX(a,b) = int_s^t (X^a_u - X^a_s) dX^b_u
//               i.e. row = running increment coordinate, column = differential.
//   (x (x) y)(a,b) = x_a * y_b, so Chen's relation reads
//                   XX_{st} = XX_{su} + XX_{ut} + X_{su} (x) X_{ut}.
//
// Storage is cumulative: values row i holds X_{t_i}, cum2[i] holds A_i =
// XX_{0,t_i} with A_0 = 0. Reconstruction
//     XX_{ij} = A_j - A_i - X_{0,i} (x) X_{ij}
// is O(1) and satisfies Chen identically, so chen_residual measures
// floating-point noise, not modelling error.
class RoughPath {
  public:
    RoughPath(TimeGrid grid, Mat values, std::vector<Mat> cum2, double alpha)
        : grid_(std::move(grid)), values_(std::move(values)), cum2_(std::move(cum2)), alpha_(alpha) {
        require_alpha(alpha_);
        require(static_cast<std::size_t>(values_.rows()) == grid_.n_points(),
                "values must have one row per grid point");
        require(values_.cols() >= 1, "driver dimension must be >= 1");
        require(cum2_.size() == grid_.n_points(), "cum2 must have one tensor per grid point");
        const auto d = values_.cols();
        for (const Mat& a : cum2_)
            require(a.rows() == d && a.cols() == d, "cum2 tensors must be d x d");
        require(cum2_.front().isZero(0.0), "cum2 must start from the zero tensor");
    }

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return static_cast<std::size_t>(values_.cols()); }
    std::size_t n_steps() const { return grid_.n_steps(); }
    double alpha() const { return alpha_; }
    const Mat& values() const { return values_; }
    const std::vector<Mat>& cum2() const { return cum2_; }

    Vec value(std::size_t i) const { return values_.row(grid_.check(i)).transpose(); }

    Vec increment(std::size_t i, std::size_t j) const {
        return (values_.row(grid_.check(j)) - values_.row(grid_.check(i))).transpose();
    }

    Mat second_level(std::size_t i, std::size_t j) const {
        order(i, j);
        const Vec from_start = increment(0, i);
        return cum2_[j] - cum2_[i] - from_start * increment(i, j).transpose();
    }

    // Frobenius norm of the Chen defect over (i, k, j); ~1e-15 * |X|^2 by
    // construction, larger values indicate corrupted or inconsistent data.
    double chen_residual(std::size_t i, std::size_t k, std::size_t j) const {
        order(i, k);
        order(k, j);
        const Mat defect = second_level(i, j) - second_level(i, k) - second_level(k, j) -
                           increment(i, k) * increment(k, j).transpose();
        return defect.norm();
    }

    // Bracket [X]_{ij} = X_{ij} (x) X_{ij} - 2 Sym(XX_{ij}); symmetric, additive
    // in the interval, and identically zero for weakly geometric drivers.
    Mat bracket(std::size_t i, std::size_t j) const {
        const Vec inc = increment(i, j);
        return inc * inc.transpose() - 2.0 * sym_part(second_level(i, j));
    }

    double sup_norm() const {
        double m = 0.0;
        for (Eigen::Index i = 0; i < values_.rows(); ++i)
            m = std::max(m, values_.row(i).norm());
        return m;
    }

    bool is_weak_geometric(double tol_scale = 1e-10) const {
        const double tol = tol_scale * (1.0 + sup_norm() * sup_norm());
        for (std::size_t i = 1; i <= n_steps(); ++i)
            if (bracket(0, i).norm() > tol) return false;
        for (std::size_t i = 0; i < n_steps(); ++i)
            if (bracket(i, i + 1).norm() > tol) return false;
        return true;
    }

  private:
    void order(std::size_t i, std::size_t j) const {
        grid_.check(i);
        grid_.check(j);
        require(i <= j, "interval indices must be ordered");
    }

    TimeGrid grid_;
    Mat values_;
    std::vector<Mat> cum2_;
    double alpha_;
};

struct HoelderReport {
    double alpha = 0.0;
    double norm_x_alpha = 0.0;     // sup |X_{ij}| / dt^alpha
    double norm_xx_2alpha = 0.0;   // sup |XX_{ij}|_F / dt^(2 alpha)
    double norm_x_sup = 0.0;       // sup_i |X_{t_i}|
    double bracket_2alpha = 0.0;   // sup |[X]_{ij}|_F / dt^(2 alpha)
    bool adjacent_only = false;    // fast mode: adjacent pairs only, a lower bound
};

// All-pairs by default (O(N^2)); adjacent_only scans the N adjacent pairs and is
// flagged in the report since it only lower-bounds the seminorms.
HoelderReport hoelder_norms(const RoughPath& p, double alpha, bool adjacent_only = false);

// Geometrized companion: same level 1, XX + [X]/2 as level 2. Weakly geometric
// by construction, and exactly so in floating point because the bracket is
// interval-additive.
RoughPath geometrize(const RoughPath& p);

// alpha-scale distance on level 1 plus 2*alpha-scale distance on level 2, over
// all grid pairs of the shared grid.
double rough_distance(const RoughPath& p, const RoughPath& q, double alpha);

// Every-k-th-point restriction; exact on both levels.
RoughPath restrict_stride(const RoughPath& p, std::size_t stride);

// The driver over [t_{i0}, t_{i1}], clock restarted at zero. Values keep their
// absolute offsets (only increments matter downstream); level 2 is rebased so
// the sub-path's tensors equal the parent's over the same intervals.
RoughPath subinterval(const RoughPath& p, std::size_t i0, std::size_t i1);

}  // namespace roughw
