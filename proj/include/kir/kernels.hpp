#pragma once

#include <Eigen/Dense>
#include <string>

#include "kir/linalg.hpp"
#include "kir/points.hpp"

namespace kir {

enum class KernelFamily { Gaussian, Brownian, SO3Rotation };

std::string kernel_family_name(KernelFamily f);

// A kernel family plus its parameters, evaluable on pairs of points.
//
// Gaussian:     k(a, b) = exp(-||a - b||^2 / (2 sigma^2)), real vectors.
// Brownian:     k(a, b) = ||a|| + ||b|| - ||a - b||; stated for scalars,
//               extended to R^d through Euclidean norms.
// SO3Rotation:  k(A, B) = pi * theta * (pi - theta) / (8 sin theta) with
//               theta the geodesic angle; the removable singularities at
//               theta in {0, pi} evaluate to the limit pi^2 / 8.
class KernelSpec {
public:
    static constexpr double kSo3SingularTol = 1e-7;

    static KernelSpec gaussian(double bandwidth, Eigen::Index dim = 0);
    static KernelSpec brownian(Eigen::Index dim = 0);
    static KernelSpec so3();

    KernelFamily family() const noexcept { return family_; }
    double bandwidth() const noexcept { return bandwidth_; }
    PointKind input_kind() const noexcept { return input_kind_; }
    Eigen::Index input_dim() const noexcept { return input_dim_; }  // 0 = any

    double eval(const PointSet& pts, std::size_t i, std::size_t j) const;
    double eval_real(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    double eval_rotation(const Rotation3& a, const Rotation3& b) const;

    // Vectorized row of the Gram matrix: out[t] = k(p_t, p_i).
    Eigen::VectorXd eval_row(const PointSet& pts, std::size_t i) const;

private:
    KernelSpec(KernelFamily f, double bw, PointKind kind, Eigen::Index dim)
        : family_(f), bandwidth_(bw), input_kind_(kind), input_dim_(dim) {}

    void check_point_set(const PointSet& pts) const;

    KernelFamily family_;
    double bandwidth_;
    PointKind input_kind_;
    Eigen::Index input_dim_;
};

// Geodesic angle in [0, pi]: arccos of (Tr(B^T A) - 1)/2, clamped to
// absorb floating-point drift.
double so3_geodesic_angle(const Rotation3& a, const Rotation3& b);

// Median of the off-diagonal pairwise distances {d(p_i, p_j) : i < j}
// under the point set's metric; for an even count, the mean of the two
// middle values. Throws DegenerateSample when all distances are zero.
double median_heuristic_bandwidth(const PointSet& points);

// n x n matrix of entrywise kernel evaluations.
SymmetricMatrix gram_matrix(const KernelSpec& spec, const PointSet& points);

}  // namespace kir
