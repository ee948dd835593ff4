#include "kir/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "kir/errors.hpp"

namespace kir {

std::string kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Brownian: return "brownian";
        case KernelFamily::SO3Rotation: return "so3";
    }
    return "unknown";
}

KernelSpec KernelSpec::gaussian(double bandwidth, Eigen::Index dim) {
    if (!(bandwidth > 0.0)) {
        std::ostringstream os;
        os << "Gaussian bandwidth must be positive, got " << bandwidth;
        throw DegenerateSample(os.str());
    }
    return KernelSpec(KernelFamily::Gaussian, bandwidth, PointKind::Real, dim);
}

KernelSpec KernelSpec::brownian(Eigen::Index dim) {
    return KernelSpec(KernelFamily::Brownian, 0.0, PointKind::Real, dim);
}

KernelSpec KernelSpec::so3() {
    return KernelSpec(KernelFamily::SO3Rotation, 0.0, PointKind::Rotation, 0);
}

double so3_geodesic_angle(const Rotation3& a, const Rotation3& b) {
    return geodesic_angle(a, b);
}

namespace {

double so3_kernel_from_angle(double theta) {
    constexpr double pi = std::numbers::pi;
    // Removable singularities at both endpoints share the limit pi^2/8.
    if (theta < KernelSpec::kSo3SingularTol || pi - theta < KernelSpec::kSo3SingularTol)
        return pi * pi / 8.0;
    return pi * theta * (pi - theta) / (8.0 * std::sin(theta));
}

double so3_kernel_from_frobenius(double frob) {
    return so3_kernel_from_angle(std::acos(std::clamp((frob - 1.0) / 2.0, -1.0, 1.0)));
}

// Rotations flattened to rows of 9 for bulk inner products.
RealMatrix flat_rotations(const std::vector<Rotation3>& rs) {
    RealMatrix m(static_cast<Eigen::Index>(rs.size()), 9);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto entries = rs[i].row_major();
        for (int c = 0; c < 9; ++c) m(static_cast<Eigen::Index>(i), c) = entries[static_cast<std::size_t>(c)];
    }
    return m;
}

}  // namespace

double KernelSpec::eval_real(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    if (input_kind_ != PointKind::Real)
        throw DimensionMismatch("kernel expects rotation inputs, got real vectors");
    if (a.size() != b.size())
        throw DimensionMismatch("kernel arguments have different dimensions");
    if (input_dim_ != 0 && a.size() != input_dim_)
        throw DimensionMismatch("kernel argument dimension does not match spec");
    switch (family_) {
        case KernelFamily::Gaussian: {
            const double d2 = (a - b).squaredNorm();
            return std::exp(-d2 / (2.0 * bandwidth_ * bandwidth_));
        }
        case KernelFamily::Brownian:
            return a.norm() + b.norm() - (a - b).norm();
        case KernelFamily::SO3Rotation:
            break;
    }
    throw DimensionMismatch("SO(3) kernel cannot evaluate real vectors");
}

double KernelSpec::eval_rotation(const Rotation3& a, const Rotation3& b) const {
    if (family_ != KernelFamily::SO3Rotation)
        throw DimensionMismatch("kernel expects real-vector inputs, got rotations");
    return so3_kernel_from_angle(geodesic_angle(a, b));
}

void KernelSpec::check_point_set(const PointSet& pts) const {
    if (pts.kind() != input_kind_)
        throw DimensionMismatch("point kind does not match kernel spec");
    if (input_kind_ == PointKind::Real && input_dim_ != 0 && pts.dim() != input_dim_)
        throw DimensionMismatch("point dimension does not match kernel spec");
}

double KernelSpec::eval(const PointSet& pts, std::size_t i, std::size_t j) const {
    check_point_set(pts);
    if (input_kind_ == PointKind::Real) {
        const auto& m = pts.real_matrix();
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        switch (family_) {
            case KernelFamily::Gaussian: {
                const double d2 = (m.row(ii) - m.row(jj)).squaredNorm();
                return std::exp(-d2 / (2.0 * bandwidth_ * bandwidth_));
            }
            case KernelFamily::Brownian:
                return m.row(ii).norm() + m.row(jj).norm() - (m.row(ii) - m.row(jj)).norm();
            default:
                break;
        }
    }
    const auto& rs = pts.rotation_list();
    return so3_kernel_from_angle(geodesic_angle(rs[i], rs[j]));
}

double median_heuristic_bandwidth(const PointSet& points) {
    const std::size_t n = points.size();
    if (n < 2) throw DegenerateSample("median heuristic needs at least 2 points");
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    bool any_positive = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = points.distance(i, j);
            any_positive = any_positive || d > 0.0;
            dists.push_back(d);
        }
    }
    if (!any_positive)
        throw DegenerateSample("all pairwise distances are zero");
    const std::size_t m = dists.size();
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    if (m % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(dists.begin(), mid);
    return 0.5 * (lower + upper);
}

Eigen::VectorXd KernelSpec::eval_row(const PointSet& pts, std::size_t i) const {
    check_point_set(pts);
    const auto ii = static_cast<Eigen::Index>(i);
    if (input_kind_ == PointKind::Real) {
        const auto& m = pts.real_matrix();
        if (family_ == KernelFamily::Gaussian) {
            const Eigen::VectorXd d2 = (m.rowwise() - m.row(ii)).rowwise().squaredNorm();
            return (-d2.array() / (2.0 * bandwidth_ * bandwidth_)).exp();
        }
        const Eigen::VectorXd norms = m.rowwise().norm();
        const Eigen::VectorXd dist = (m.rowwise() - m.row(ii)).rowwise().norm();
        return norms.array() + norms(ii) - dist.array();
    }
    const auto& rs = pts.rotation_list();
    const auto n = static_cast<Eigen::Index>(rs.size());
    const Eigen::Matrix3d& base = rs[i].matrix();
    Eigen::VectorXd out(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const double frob = (rs[static_cast<std::size_t>(t)].matrix().array() * base.array()).sum();
        out(t) = so3_kernel_from_frobenius(frob);
    }
    return out;
}

SymmetricMatrix gram_matrix(const KernelSpec& spec, const PointSet& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n == 0) throw EmptySample("Gram matrix of an empty point set");
    Eigen::MatrixXd g(n, n);

    if (spec.input_kind() == PointKind::Real && points.kind() == PointKind::Real) {
        const auto& m = points.real_matrix();
        const Eigen::VectorXd sq = m.rowwise().squaredNorm();
        Eigen::MatrixXd inner(n, n);
        inner.noalias() = m * m.transpose();
        // Squared distances with cancellation clamped at zero.
        Eigen::MatrixXd d2 = (-2.0 * inner).colwise() + sq;
        d2.rowwise() += sq.transpose();
        d2 = d2.cwiseMax(0.0);
        if (spec.family() == KernelFamily::Gaussian) {
            const double bw = spec.bandwidth();
            g = (-d2.array() / (2.0 * bw * bw)).exp();
        } else {
            const Eigen::VectorXd norms = sq.cwiseSqrt();
            g = d2.cwiseSqrt();
            g = ((-g).colwise() + norms).rowwise() + norms.transpose();
        }
    } else if (spec.input_kind() == PointKind::Rotation &&
               points.kind() == PointKind::Rotation) {
        const RealMatrix flat = flat_rotations(points.rotation_list());
        Eigen::MatrixXd frob(n, n);
        frob.noalias() = flat * flat.transpose();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = so3_kernel_from_frobenius(frob(i, j));
    } else {
        // Mismatched kinds fall through to the checked scalar path, which
        // raises the right error.
        (void)spec.eval(points, 0, 0);
    }

    // Exact symmetry and definitionally exact diagonal.
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i, i) = spec.eval(points, static_cast<std::size_t>(i), static_cast<std::size_t>(i));
        for (Eigen::Index j = i + 1; j < n; ++j) g(j, i) = g(i, j);
    }
    return SymmetricMatrix(std::move(g));
}

}  // namespace kir
