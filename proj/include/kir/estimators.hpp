#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kir/kernels.hpp"
#include "kir/points.hpp"

namespace kir {

inline constexpr double kDefaultDenominatorFloor = 1e-12;
inline constexpr std::size_t kDefaultNeighbours = 5;
inline constexpr double kDefaultEpsilon = 1e-4;

// Point estimate of the kernel integrated R^2 together with the
// per-index moments it was assembled from.
//
// numerators[i] estimates E_X[ V_{Y|X}[ k_Y(Y, Y_i) ] ], and
// denominators[i] estimates V_Y[ k_Y(Y, Y_i) ]. Indices whose denominator
// falls at or below the floor are dropped from the mean and listed in
// dropped_indices; d_hat = 1 - (1/n') sum over retained i of E_i / V_i.
struct EstimatorResult {
    double d_hat = 0.0;
    double d_hat_clamped = 0.0;  // min(1, max(0, d_hat))
    std::vector<double> numerators;
    std::vector<double> denominators;
    std::vector<std::size_t> dropped_indices;
    std::string method;
    std::size_t k = 0;        // K-NN variants
    double epsilon = 0.0;     // RKHS variant
    std::uint64_t seed = 0;
    double denominator_floor = kDefaultDenominatorFloor;
};

// K-nearest-neighbour estimator. The X-side metric is the point set's
// own (Euclidean or geodesic); ties in neighbour distances are broken by
// seeded priorities. Requires n >= k + 2. With strict = true any dropped
// index is an error instead.
EstimatorResult d_knn(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                      std::uint64_t seed, double denominator_floor = kDefaultDenominatorFloor,
                      bool strict = false);

// Brute-force reference: full distance sorts per (i, j), no tree. Shares
// the tie-break priority stream with d_knn, so results agree bit-for-bit
// up to roundoff. Guarded to n <= 500.
EstimatorResult d_knn_naive(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                            std::uint64_t seed,
                            double denominator_floor = kDefaultDenominatorFloor,
                            bool strict = false);

// Conditional-mean-embedding estimator with ridge n * epsilon.
EstimatorResult d_rkhs(const SampleSet& sample, const KernelSpec& kernel_x,
                       const KernelSpec& kernel_y, double epsilon,
                       double denominator_floor = kDefaultDenominatorFloor,
                       bool strict = false);

// Chatterjee's rank correlation coefficient, no-ties-in-Y form:
// 1 - 3 sum |r_{i+1} - r_i| / (n^2 - 1) over pairs ordered by X.
// Ties in X are ordered by seeded random priorities.
double xi_n(const SampleSet& sample, std::uint64_t seed = 0);

// Globally normalized variant: eta_hat = 1 - (sum_i E_i) / (sum_i V_i)
// over the same per-index moments as the corresponding D estimator. This
// is an in-house construction built from those moments, not a port of any
// existing eta estimator.
struct EtaResult {
    double eta_hat = 0.0;
    double eta_hat_clamped = 0.0;
    std::string method;
};

EtaResult eta_knn(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                  std::uint64_t seed, double denominator_floor = kDefaultDenominatorFloor);
EtaResult eta_rkhs(const SampleSet& sample, const KernelSpec& kernel_x,
                   const KernelSpec& kernel_y, double epsilon,
                   double denominator_floor = kDefaultDenominatorFloor);

namespace detail {

struct Moments {
    std::vector<double> numerators;
    std::vector<double> denominators;
};

Moments knn_moments(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                    std::uint64_t seed);
Moments knn_moments_naive(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                          std::uint64_t seed);
Moments rkhs_moments(const SampleSet& sample, const KernelSpec& kernel_x,
                     const KernelSpec& kernel_y, double epsilon);

}  // namespace detail

}  // namespace kir
