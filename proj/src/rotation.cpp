#include "kir/rotation.hpp"

#include <sstream>

#include "kir/errors.hpp"

namespace kir {

Rotation3 Rotation3::from_matrix(const Eigen::Matrix3d& m) {
    const Eigen::Matrix3d gram = m.transpose() * m;
    const double ortho_err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho_err > kOrthoTol) {
        std::ostringstream os;
        os << "matrix is not orthogonal: max |R^T R - I| = " << ortho_err;
        throw InvalidRotation(os.str());
    }
    const double det_err = std::abs(m.determinant() - 1.0);
    if (det_err > kOrthoTol) {
        std::ostringstream os;
        os << "matrix determinant is not +1: |det - 1| = " << det_err;
        throw InvalidRotation(os.str());
    }
    return Rotation3(m);
}

Rotation3 Rotation3::from_row_major(const std::array<double, 9>& entries) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = entries[static_cast<std::size_t>(3 * r + c)];
    return from_matrix(m);
}

std::array<double, 9> Rotation3::row_major() const {
    std::array<double, 9> out{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(3 * r + c)] = m_(r, c);
    return out;
}

}  // namespace kir
