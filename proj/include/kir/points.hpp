#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "kir/rotation.hpp"

namespace kir {

enum class PointKind { Real, Rotation };

// The metric attached to each point kind: Euclidean distance for real
// vectors, geodesic angle for rotations.
double geodesic_angle(const Rotation3& a, const Rotation3& b);

using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Homogeneous collection of points: either n real d-vectors (one per row)
// or n rotation matrices.
class PointSet {
public:
    static PointSet reals(RealMatrix pts);
    static PointSet reals_1d(const std::vector<double>& values);
    static PointSet rotations(std::vector<Rotation3> rs);

    PointKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept {
        return kind_ == PointKind::Real ? static_cast<std::size_t>(reals_.rows())
                                        : rotations_.size();
    }
    Eigen::Index dim() const;  // real points only

    const RealMatrix& real_matrix() const;
    const std::vector<Rotation3>& rotation_list() const;
    double scalar(std::size_t i) const;  // requires dim() == 1

    double distance(std::size_t i, std::size_t j) const {
        if (kind_ == PointKind::Real) return (reals_.row(i_(i)) - reals_.row(i_(j))).norm();
        return geodesic_angle(rotations_[i], rotations_[j]);
    }

    PointSet permuted(const std::vector<std::size_t>& perm) const;

private:
    PointSet() = default;
    static Eigen::Index i_(std::size_t i) { return static_cast<Eigen::Index>(i); }

    PointKind kind_ = PointKind::Real;
    RealMatrix reals_;
    std::vector<Rotation3> rotations_;
};

// Paired (X_i, Y_i) observations with a shared count.
struct SampleSet {
    PointSet x;
    PointSet y;

    SampleSet(PointSet x_pts, PointSet y_pts);
    std::size_t size() const noexcept { return x.size(); }
};

}  // namespace kir
