#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kir/kernels.hpp"
#include "kir/points.hpp"

namespace kir {

// Finite joint distribution over small X/Y alphabets. X labels are
// abstract; when a sample is materialized they embed as the reals
// 0, 1, 2, ... so the K-NN estimator sees a valid metric space.
class DiscreteJoint {
public:
    static constexpr double kMassTol = 1e-12;

    DiscreteJoint(std::vector<std::string> x_labels, PointSet y_points, Eigen::MatrixXd probs);

    static DiscreteJoint from_json(const nlohmann::json& doc);

    std::size_t x_size() const noexcept { return x_labels_.size(); }
    std::size_t y_size() const noexcept { return y_points_.size(); }
    const std::vector<std::string>& x_labels() const noexcept { return x_labels_; }
    const PointSet& y_points() const noexcept { return y_points_; }
    const Eigen::MatrixXd& probs() const noexcept { return probs_; }

    double x_marginal(std::size_t a) const;
    double y_marginal(std::size_t b) const;

private:
    std::vector<std::string> x_labels_;
    PointSet y_points_;
    Eigen::MatrixXd probs_;  // |X| x |Y|
};

// Exact population value of the kernel integrated R^2 on a discrete
// joint, evaluated as finite sums of the defining expression
// 1 - Int E_X[V_{Y|X}[k(Y,y)]] / V_Y[k(Y,y)] dP_Y(y).
double population_d_discrete(const DiscreteJoint& joint, const KernelSpec& kernel_y);

// The variance-of-conditional-means route,
// Int V_X[E_{Y|X}[k(Y,y)]] / V_Y[k(Y,y)] dP_Y(y); equal to the value
// above by the law of total variance.
double population_d_alt_discrete(const DiscreteJoint& joint, const KernelSpec& kernel_y);

// Exact population value of the globally normalized measure
// Int MMD^2(P_{Y|X=x}, P_Y) dP_X / Int ||k(.,y) - E k(.,Y)||^2 dP_Y,
// with all RKHS norms expanded into double kernel sums.
double population_eta_discrete(const DiscreteJoint& joint, const KernelSpec& kernel_y);

// i.i.d. draws by inverse-CDF sampling over the flattened cells.
SampleSet sample_from_joint(const DiscreteJoint& joint, std::size_t n, std::uint64_t seed);

}  // namespace kir
