#include "kir/points.hpp"

#include <algorithm>
#include <cmath>

#include "kir/errors.hpp"

namespace kir {

double geodesic_angle(const Rotation3& a, const Rotation3& b) {
    // cos(theta) = (Tr(B^T A) - 1) / 2; Tr(B^T A) is the Frobenius inner
    // product, which makes the evaluation exactly symmetric in (a, b).
    const double frob = (a.matrix().array() * b.matrix().array()).sum();
    const double cos_theta = std::clamp((frob - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(cos_theta);
}

PointSet PointSet::reals(RealMatrix pts) {
    PointSet ps;
    ps.kind_ = PointKind::Real;
    ps.reals_ = std::move(pts);
    return ps;
}

PointSet PointSet::reals_1d(const std::vector<double>& values) {
    RealMatrix m(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
    return reals(std::move(m));
}

PointSet PointSet::rotations(std::vector<Rotation3> rs) {
    PointSet ps;
    ps.kind_ = PointKind::Rotation;
    ps.rotations_ = std::move(rs);
    return ps;
}

Eigen::Index PointSet::dim() const {
    if (kind_ != PointKind::Real)
        throw DimensionMismatch("dim() is only defined for real-vector point sets");
    return reals_.cols();
}

const RealMatrix& PointSet::real_matrix() const {
    if (kind_ != PointKind::Real)
        throw DimensionMismatch("point set does not hold real vectors");
    return reals_;
}

const std::vector<Rotation3>& PointSet::rotation_list() const {
    if (kind_ != PointKind::Rotation)
        throw DimensionMismatch("point set does not hold rotations");
    return rotations_;
}

double PointSet::scalar(std::size_t i) const {
    if (kind_ != PointKind::Real || reals_.cols() != 1)
        throw NotScalar("scalar access requires 1-dimensional real points");
    return reals_(i_(i), 0);
}

PointSet PointSet::permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != size())
        throw DimensionMismatch("permutation length does not match point count");
    if (kind_ == PointKind::Real) {
        RealMatrix out(reals_.rows(), reals_.cols());
        for (std::size_t i = 0; i < perm.size(); ++i)
            out.row(i_(i)) = reals_.row(i_(perm[i]));
        return reals(std::move(out));
    }
    std::vector<Rotation3> out;
    out.reserve(rotations_.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out.push_back(rotations_[perm[i]]);
    return rotations(std::move(out));
}

SampleSet::SampleSet(PointSet x_pts, PointSet y_pts) : x(std::move(x_pts)), y(std::move(y_pts)) {
    if (x.size() != y.size())
        throw DimensionMismatch("X and Y must contain the same number of points");
}

}  // namespace kir
