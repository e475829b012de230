#pragma once

#include "roughw/rough_path.hpp"

namespace roughw {

// Gubinelli pair (Y, dY) on the driver's grid. values row i is Y_{t_i} (an
// m-vector); gubinelli[i] is the m x d matrix dY_{t_i} mapping driver
// increments to value increments, so the remainder
//     R_{ij} = Y_{ij} - dY_i X_{ij}
// is the 2 alpha-order part. The driver is referenced, not owned, and must
// outlive the path.
class ControlledPath {
  public:
    ControlledPath(const RoughPath& driver, Mat values, std::vector<Mat> gubinelli)
        : driver_(&driver), values_(std::move(values)), gubinelli_(std::move(gubinelli)) {
        require(static_cast<std::size_t>(values_.rows()) == driver.grid().n_points(),
                "controlled path needs one row per grid point");
        require(gubinelli_.size() == driver.grid().n_points(),
                "controlled path needs one derivative per grid point");
        for (const Mat& g : gubinelli_)
            require(g.rows() == values_.cols() && g.cols() == static_cast<Eigen::Index>(driver.dim()),
                    "gubinelli blocks must be m x d");
    }

    const RoughPath& driver() const { return *driver_; }
    std::size_t n_steps() const { return driver_->n_steps(); }
    std::size_t dim() const { return static_cast<std::size_t>(values_.cols()); }
    const Mat& values() const { return values_; }
    const std::vector<Mat>& gubinelli() const { return gubinelli_; }

    Vec value(std::size_t i) const { return values_.row(driver_->grid().check(i)).transpose(); }
    const Mat& derivative(std::size_t i) const {
        driver_->grid().check(i);
        return gubinelli_[i];
    }
    Vec increment(std::size_t i, std::size_t j) const {
        return (values_.row(driver_->grid().check(j)) - values_.row(driver_->grid().check(i)))
            .transpose();
    }

  private:
    const RoughPath* driver_;
    Mat values_;
    std::vector<Mat> gubinelli_;
};

struct ControlledNormReport {
    double alpha = 0.0;
    double y0_abs = 0.0;
    double dy0_abs = 0.0;
    double dy_alpha = 0.0;          // sup |dY_{ij}|_F / dt^alpha
    double remainder_2alpha = 0.0;  // sup |R_{ij}| / dt^(2 alpha)
    double total = 0.0;
};

// Y = X with dY = I; the basic controlled path every construction starts from.
ControlledPath canonical_lift(const RoughPath& p);

// Scalar coordinate Y = X^c with dY = e_c^T.
ControlledPath coordinate_lift(const RoughPath& p, std::size_t c);

Vec remainder(const ControlledPath& y, std::size_t i, std::size_t j);

ControlledNormReport controlled_norm(const ControlledPath& y, double alpha);

// Space-time field f(t, x) with enough derivatives for chain-rule composition:
// jac is the spatial Jacobian, dx the Gubinelli derivative of t -> f(t, x).
// Missing jac falls back to central differences at step 1e-5 * (1 + |x|) and is
// flagged. hess rows are per-output Hessians; time_grad feeds no computation
// here and exists for callers that need d/dt fields.
struct FieldFunction {
    std::size_t in_dim = 1;
    std::size_t out_dim = 1;
    std::function<Vec(std::size_t, const Vec&)> eval;                  // -> out
    std::function<Mat(std::size_t, const Vec&)> jac;                   // -> out x in
    std::function<std::vector<Mat>(std::size_t, const Vec&)> hess;     // out of in x in
    std::function<Mat(std::size_t, const Vec&)> dx;                    // -> out x d
    bool fd_jacobian = false;

    Mat jacobian(std::size_t ti, const Vec& x) const;
    Mat gubinelli(std::size_t ti, const Vec& x, std::size_t driver_dim) const;
};

FieldFunction time_independent_field(std::size_t in_dim, std::size_t out_dim,
                                     std::function<Vec(const Vec&)> eval,
                                     std::function<Mat(const Vec&)> jac = nullptr);

// eta_t = f(t, Z_t) with d eta_t = dx f(t, Z_t) + Jf(t, Z_t) dZ_t.
ControlledPath compose_chain_rule(const FieldFunction& f, const ControlledPath& z);

// Integrand shape for integrals against the driver: a path of row maps
// L(R^d, R), values row i = Y_{t_i}, and gubinelli[i](a, b) the rate of
// component b in driver direction a. Applied to a level-2 tensor by full
// contraction sum_ab g(a, b) XX(a, b).
class RowControlledPath {
  public:
    RowControlledPath(const RoughPath& driver, Mat values, std::vector<Mat> gubinelli)
        : driver_(&driver), values_(std::move(values)), gubinelli_(std::move(gubinelli)) {
        const auto d = static_cast<Eigen::Index>(driver.dim());
        require(static_cast<std::size_t>(values_.rows()) == driver.grid().n_points(),
                "row path needs one row per grid point");
        require(values_.cols() == d, "row path values must be 1 x d rows");
        require(gubinelli_.size() == driver.grid().n_points(),
                "row path needs one derivative per grid point");
        for (const Mat& g : gubinelli_)
            require(g.rows() == d && g.cols() == d, "row path derivatives must be d x d");
    }

    const RoughPath& driver() const { return *driver_; }
    std::size_t n_steps() const { return driver_->n_steps(); }
    const Mat& values() const { return values_; }
    const std::vector<Mat>& gubinelli() const { return gubinelli_; }
    Vec value(std::size_t i) const { return values_.row(driver_->grid().check(i)).transpose(); }
    const Mat& derivative(std::size_t i) const {
        driver_->grid().check(i);
        return gubinelli_[i];
    }

  private:
    const RoughPath* driver_;
    Mat values_;
    std::vector<Mat> gubinelli_;
};

}  // namespace roughw
