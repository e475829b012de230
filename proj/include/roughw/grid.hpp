#pragma once

#include "roughw/common.hpp"

namespace roughw {

// Partition 0 = t_0 < t_1 < ... < t_N = T. All paths in this library live on
// one of these; index arguments name grid points, never raw times.
class TimeGrid {
  public:
    TimeGrid() = default;

    explicit TimeGrid(Vec times) : times_(std::move(times)) {
        require(times_.size() >= 2, "grid needs at least two points");
        require(times_[0] == 0.0, "grid must start at t = 0");
        for (Eigen::Index i = 1; i < times_.size(); ++i)
            require(times_[i] > times_[i - 1], "grid times must be strictly increasing");
    }

    static TimeGrid uniform(std::size_t n, double horizon) {
        require(n >= 1, "uniform grid needs n >= 1");
        require(horizon > 0, "uniform grid needs horizon > 0");
        Vec t(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            t[static_cast<Eigen::Index>(i)] = horizon * static_cast<double>(i) / static_cast<double>(n);
        t[static_cast<Eigen::Index>(n)] = horizon;
        return TimeGrid(std::move(t));
    }

    std::size_t n_steps() const { return static_cast<std::size_t>(times_.size()) - 1; }
    std::size_t n_points() const { return static_cast<std::size_t>(times_.size()); }
    double time(std::size_t i) const { return times_[check(i)]; }
    double horizon() const { return times_[times_.size() - 1]; }
    double dt(std::size_t i, std::size_t j) const { return time(j) - time(i); }
    const Vec& times() const { return times_; }

    Eigen::Index check(std::size_t i) const {
        require(i < n_points(), "grid index " + std::to_string(i) + " out of range");
        return static_cast<Eigen::Index>(i);
    }

    // Subgrid taking every `stride`-th point; stride must divide N.
    TimeGrid restrict_stride(std::size_t stride) const {
        require(stride >= 1 && n_steps() % stride == 0, "stride must divide the step count");
        Vec t(n_steps() / stride + 1);
        for (std::size_t i = 0; i <= n_steps() / stride; ++i)
            t[static_cast<Eigen::Index>(i)] = time(i * stride);
        return TimeGrid(std::move(t));
    }

    bool same_as(const TimeGrid& other) const {
        return times_.size() == other.times_.size() && times_ == other.times_;
    }

  private:
    Vec times_;
};

}  // namespace roughw
