#pragma once

#include <cstdint>
#include <vector>

#include "kir/points.hpp"

namespace kir {

// Tie-break priority for candidate `idx` when ranking neighbours of
// `center`: candidates at equal distance are ordered by this value, which
// realizes "ties broken uniformly at random" reproducibly. The priority
// depends only on (seed, center, idx), so every code path ranking the
// same center's candidates agrees on the order.
std::uint64_t tie_priority(std::uint64_t tie_seed, std::size_t center, std::size_t idx);

// Vantage-point tree over a point set's metric (Euclidean for real
// vectors, geodesic angle for rotations). Exact: query results equal a
// brute-force scan under the same tie-break permutation. Immutable after
// construction; concurrent queries are safe. The point set must outlive
// the tree.
class VpTree {
public:
    VpTree(const PointSet& points, std::uint64_t seed);

    std::size_t size() const noexcept { return n_; }

    // The k nearest points to points[center], excluding `center` itself
    // and every index in `exclude`, sorted by (distance, tie priority).
    // Throws InsufficientPoints when fewer than k candidates remain.
    std::vector<std::size_t> k_nearest_excluding(std::size_t center,
                                                 const std::vector<std::size_t>& exclude,
                                                 std::size_t k,
                                                 std::uint64_t tie_seed) const;

private:
    struct Node {
        std::size_t vp = 0;
        double radius = 0.0;
        int left = -1;
        int right = -1;
    };

    int build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi,
              class BuildRng& rng);

    const PointSet* points_;
    std::size_t n_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

// Per-center neighbour lists with exclusion set {center}: entry j holds
// the K nearest neighbours of X_j among the other points.
struct NeighbourTable {
    std::size_t k = 0;
    std::uint64_t tie_seed = 0;
    std::vector<std::vector<std::size_t>> neighbours;
};

NeighbourTable build_neighbour_table(const VpTree& tree, std::size_t k, std::uint64_t tie_seed);

// In-degrees delta_l = |{j : l in N_j}|. Sums to (#centers) * K.
std::vector<std::size_t> knn_in_degrees(const NeighbourTable& table, std::size_t n);

// Diagnostic for the bounded-in-degree condition the K-NN estimator's
// consistency analysis relies on. No pass/fail threshold is known; the
// soft bound flags max delta_l > 10 K for inspection.
struct InDegreeDiagnostic {
    std::size_t max_in_degree = 0;
    double max_over_k = 0.0;
    bool exceeds_soft_bound = false;
};

InDegreeDiagnostic in_degree_diagnostic(const NeighbourTable& table, std::size_t n);

}  // namespace kir
