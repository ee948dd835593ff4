#pragma once

#include <Eigen/Dense>
#include <array>

namespace kir {

// 3x3 rotation matrix, validated on construction:
// R^T R = I and det R = +1, both within 1e-9.
class Rotation3 {
public:
    static constexpr double kOrthoTol = 1e-9;

    static Rotation3 from_matrix(const Eigen::Matrix3d& m);
    static Rotation3 from_row_major(const std::array<double, 9>& entries);

    const Eigen::Matrix3d& matrix() const noexcept { return m_; }
    std::array<double, 9> row_major() const;

private:
    explicit Rotation3(const Eigen::Matrix3d& m) : m_(m) {}
    Eigen::Matrix3d m_;
};

}  // namespace kir
