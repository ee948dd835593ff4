#include "kir/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kir/errors.hpp"
#include "kir/linalg.hpp"
#include "kir/neighbours.hpp"
#include "kir/parallel.hpp"
#include "kir/rng.hpp"

namespace kir {

namespace {

// Substream tags for deriving independent seeds from the caller's seed.
// The tie-break stream is shared between the tree-backed and brute-force
// K-NN paths so their neighbour rankings coincide.
constexpr std::uint64_t kTreeStream = 0x7265;  // vantage-point choices
constexpr std::uint64_t kTieStream = 0x7469;   // neighbour tie priorities

void check_knn_preconditions(const SampleSet& sample, std::size_t k) {
    const std::size_t n = sample.size();
    if (k == 0) throw InsufficientPoints("K must be at least 1");
    if (n < k + 2) {
        std::ostringstream os;
        os << "K-NN estimator needs n >= K + 2 (n = " << n << ", K = " << k << ")";
        throw InsufficientPoints(os.str());
    }
}

// Per-index moments from prepared neighbour lists. `neighbour_of` yields,
// for retained centre j under exclusion of i, the ordered neighbour
// candidates; the first k not equal to i enter the inner sum. Both K-NN
// paths accumulate in identical order (j ascending, neighbours in rank
// order) so their sums agree bitwise.
template <typename NeighbourListOf>
detail::Moments knn_moments_impl(const SampleSet& sample, const KernelSpec& kernel_y,
                                 std::size_t k, const NeighbourListOf& neighbour_list_of) {
    const std::size_t n = sample.size();
    detail::Moments mo;
    mo.numerators.assign(n, 0.0);
    mo.denominators.assign(n, 0.0);

    parallel_for(0, n, [&](std::size_t i) {
        const Eigen::VectorXd row = kernel_y.eval_row(sample.y, i);

        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum += row[j];
            sum_sq += row[j] * row[j];
        }
        const double inv = 1.0 / static_cast<double>(n - 1);
        const double mean = sum * inv;
        mo.denominators[i] = sum_sq * inv - mean * mean;

        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto& list = neighbour_list_of(i, j);
            std::size_t taken = 0;
            for (std::size_t idx : list) {
                if (idx == i) continue;
                const double diff = row[j] - row[idx];
                acc += diff * diff;
                if (++taken == k) break;
            }
        }
        mo.numerators[i] =
            acc / (2.0 * static_cast<double>(k) * static_cast<double>(n - 1));
    });
    return mo;
}

EstimatorResult assemble(detail::Moments mo, double floor, bool strict, std::string method,
                         std::size_t k, double epsilon, std::uint64_t seed) {
    EstimatorResult res;
    res.numerators = std::move(mo.numerators);
    res.denominators = std::move(mo.denominators);
    res.method = std::move(method);
    res.k = k;
    res.epsilon = epsilon;
    res.seed = seed;
    res.denominator_floor = floor;

    double ratio_sum = 0.0;
    std::size_t retained = 0;
    for (std::size_t i = 0; i < res.denominators.size(); ++i) {
        if (res.denominators[i] > floor) {
            ratio_sum += res.numerators[i] / res.denominators[i];
            ++retained;
        } else {
            res.dropped_indices.push_back(i);
        }
    }
    if (strict && !res.dropped_indices.empty()) {
        std::ostringstream os;
        os << res.dropped_indices.size()
           << " per-index denominators fell at or below the floor " << floor;
        throw DegenerateVariance(os.str());
    }
    if (retained == 0)
        throw DegenerateVariance("all per-index denominators are at or below the floor");

    res.d_hat = 1.0 - ratio_sum / static_cast<double>(retained);
    res.d_hat_clamped = std::min(1.0, std::max(0.0, res.d_hat));
    return res;
}

}  // namespace

namespace detail {

Moments knn_moments(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                    std::uint64_t seed) {
    check_knn_preconditions(sample, k);
    const std::size_t n = sample.size();
    const VpTree tree(sample.x, rng::derive(seed, kTreeStream));
    const std::uint64_t tie_seed = rng::derive(seed, kTieStream);

    // The k+1 nearest of X_j among the others contain the k nearest under
    // any single extra exclusion: removing one index from the ranked
    // prefix leaves at least k, and priorities do not depend on the
    // excluded index. This turns n(n-1) exclusion queries into n.
    std::vector<std::vector<std::size_t>> lists(n);
    parallel_for(0, n, [&](std::size_t j) {
        lists[j] = tree.k_nearest_excluding(j, {}, k + 1, tie_seed);
    });

    return knn_moments_impl(sample, kernel_y, k,
                            [&](std::size_t, std::size_t j) -> const std::vector<std::size_t>& {
                                return lists[j];
                            });
}

Moments knn_moments_naive(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                          std::uint64_t seed) {
    check_knn_preconditions(sample, k);
    const std::size_t n = sample.size();
    if (n > 500) {
        std::ostringstream os;
        os << "brute-force estimator is guarded to n <= 500, got n = " << n;
        throw GuardExceeded(os.str());
    }
    const std::uint64_t tie_seed = rng::derive(seed, kTieStream);

    // Full candidate sort per (i, j); storage is a scratch list rebuilt on
    // each call of the lookup.
    struct Scratch {
        std::vector<std::pair<double, std::uint64_t>> keyed;
        std::vector<std::size_t> list;
    };
    std::vector<Scratch> scratch(n);  // per-i slot, disjoint across workers

    auto lookup = [&](std::size_t i, std::size_t j) -> const std::vector<std::size_t>& {
        Scratch& s = scratch[i];
        s.keyed.clear();
        s.list.clear();
        for (std::size_t t = 0; t < n; ++t) {
            if (t == i || t == j) continue;
            s.keyed.emplace_back(sample.x.distance(j, t), tie_priority(tie_seed, j, t));
            s.list.push_back(t);
        }
        std::vector<std::size_t> order(s.list.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return s.keyed[a] < s.keyed[b];
        });
        std::vector<std::size_t> sorted;
        sorted.reserve(k);
        for (std::size_t r = 0; r < k; ++r) sorted.push_back(s.list[order[r]]);
        s.list = std::move(sorted);
        return s.list;
    };

    return knn_moments_impl(sample, kernel_y, k, lookup);
}

Moments rkhs_moments(const SampleSet& sample, const KernelSpec& kernel_x,
                     const KernelSpec& kernel_y, double epsilon) {
    const std::size_t n = sample.size();
    if (n < 3) throw InsufficientPoints("RKHS estimator needs n >= 3");
    if (!(epsilon > 0.0)) throw NotPositiveDefinite("epsilon must be strictly positive");
    const auto nn = static_cast<Eigen::Index>(n);
    const double nd = static_cast<double>(n);

    const SymmetricMatrix gram_x = gram_matrix(kernel_x, sample.x);
    const SymmetricMatrix gram_y = gram_matrix(kernel_y, sample.y);
    const SymmetricMatrix centered_x = center_gram(gram_x);

    // Z = (K~X + n eps I)^{-1} K~X; then K~X (K~X + n eps I)^{-1} = Z^T.
    const Eigen::MatrixXd z = ridge_solve(centered_x, nd * epsilon, centered_x.dense());

    const Eigen::MatrixXd& ky = gram_y.dense();
    const Eigen::MatrixXd ky_sq = ky.cwiseProduct(ky);

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nn);
    const Eigen::VectorXd a = ky_sq * ones;                    // (KY o KY) 1
    const Eigen::VectorXd w1 = z.transpose() * ones;           // K~X (K~X + n eps I)^{-1} 1
    const Eigen::VectorXd b = ky_sq * w1;
    const Eigen::VectorXd u = ky * ones;                       // KY 1

    Eigen::MatrixXd m(nn, nn);
    m.noalias() = ky * z.transpose();                          // M = KY K~X (K~X + n eps I)^{-1}
    const Eigen::VectorXd m1 = m * ones;
    const Eigen::VectorXd row_sq = m.rowwise().squaredNorm();

    detail::Moments mo;
    mo.numerators.resize(n);
    mo.denominators.resize(n);
    for (Eigen::Index i = 0; i < nn; ++i) {
        const double e = (a(i) + b(i) - u(i) * u(i) / nd - 2.0 * u(i) * m1(i) / nd -
                          row_sq(i)) /
                         nd;
        const double v = a(i) / nd - (u(i) / nd) * (u(i) / nd);
        mo.numerators[static_cast<std::size_t>(i)] = e;
        mo.denominators[static_cast<std::size_t>(i)] = v;
    }
    return mo;
}

}  // namespace detail

EstimatorResult d_knn(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                      std::uint64_t seed, double denominator_floor, bool strict) {
    return assemble(detail::knn_moments(sample, kernel_y, k, seed), denominator_floor, strict,
                    "knn", k, 0.0, seed);
}

EstimatorResult d_knn_naive(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                            std::uint64_t seed, double denominator_floor, bool strict) {
    return assemble(detail::knn_moments_naive(sample, kernel_y, k, seed), denominator_floor,
                    strict, "knn-naive", k, 0.0, seed);
}

EstimatorResult d_rkhs(const SampleSet& sample, const KernelSpec& kernel_x,
                       const KernelSpec& kernel_y, double epsilon, double denominator_floor,
                       bool strict) {
    return assemble(detail::rkhs_moments(sample, kernel_x, kernel_y, epsilon),
                    denominator_floor, strict, "rkhs", 0, epsilon, 0);
}

double xi_n(const SampleSet& sample, std::uint64_t seed) {
    const std::size_t n = sample.size();
    if (n < 2) throw InsufficientPoints("xi_n needs at least 2 observations");
    if (sample.x.kind() != PointKind::Real || sample.x.dim() != 1 ||
        sample.y.kind() != PointKind::Real || sample.y.dim() != 1)
        throw NotScalar("xi_n requires scalar X and Y");

    // Order by X; equal X values are ordered by seeded priorities, which
    // realizes the infinitesimal rank jitter for ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double xa = sample.x.scalar(a);
        const double xb = sample.x.scalar(b);
        if (xa != xb) return xa < xb;
        return rng::derive(seed, a) < rng::derive(seed, b);
    });

    std::vector<double> sorted_y(n);
    for (std::size_t i = 0; i < n; ++i) sorted_y[i] = sample.y.scalar(i);
    std::sort(sorted_y.begin(), sorted_y.end());
    const auto rank_leq = [&](double y) {
        return static_cast<double>(
            std::upper_bound(sorted_y.begin(), sorted_y.end(), y) - sorted_y.begin());
    };

    double abs_diff_sum = 0.0;
    double prev_rank = rank_leq(sample.y.scalar(order[0]));
    for (std::size_t i = 1; i < n; ++i) {
        const double r = rank_leq(sample.y.scalar(order[i]));
        abs_diff_sum += std::abs(r - prev_rank);
        prev_rank = r;
    }
    const double nd = static_cast<double>(n);
    return 1.0 - 3.0 * abs_diff_sum / (nd * nd - 1.0);
}

namespace {

EtaResult eta_from_moments(const detail::Moments& mo, double floor, std::string method) {
    double num = 0.0, den = 0.0;
    for (double e : mo.numerators) num += e;
    for (double v : mo.denominators) den += v;
    if (!(den > floor))
        throw DegenerateVariance("summed denominator is at or below the floor");
    EtaResult res;
    res.eta_hat = 1.0 - num / den;
    res.eta_hat_clamped = std::min(1.0, std::max(0.0, res.eta_hat));
    res.method = std::move(method);
    return res;
}

}  // namespace

EtaResult eta_knn(const SampleSet& sample, const KernelSpec& kernel_y, std::size_t k,
                  std::uint64_t seed, double denominator_floor) {
    return eta_from_moments(detail::knn_moments(sample, kernel_y, k, seed), denominator_floor,
                            "eta-knn");
}

EtaResult eta_rkhs(const SampleSet& sample, const KernelSpec& kernel_x,
                   const KernelSpec& kernel_y, double epsilon, double denominator_floor) {
    return eta_from_moments(detail::rkhs_moments(sample, kernel_x, kernel_y, epsilon),
                            denominator_floor, "eta-rkhs");
}

}  // namespace kir
