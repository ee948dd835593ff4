#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kir/errors.hpp"
#include "kir/estimators.hpp"
#include "kir/kernels.hpp"
#include "kir/neighbours.hpp"
#include "kir/rng.hpp"

using namespace kir;

namespace {

SampleSet make_sample(const std::vector<double>& x, const std::vector<double>& y) {
    return SampleSet(PointSet::reals_1d(x), PointSet::reals_1d(y));
}

SampleSet uniform_sample(std::size_t n, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = gen.next_double();
        y[i] = gen.next_double();
    }
    return make_sample(x, y);
}

double brownian(double a, double b) {
    return std::abs(a) + std::abs(b) - std::abs(a - b);
}

// Direct expansion of the K-NN moment formulas with explicit loops and
// brute-force neighbour selection, independent of the estimator path;
// only the tie-priority contract is shared.
double hand_knn_d_hat(const std::vector<double>& xs, const std::vector<double>& ys,
                      std::size_t k, std::uint64_t seed) {
    const std::size_t n = xs.size();
    const std::uint64_t tie_seed = rng::derive(seed, 0x7469);
    std::vector<double> e(n, 0.0), v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double kv = brownian(ys[j], ys[i]);
            s1 += kv;
            s2 += kv * kv;
        }
        const double inv = 1.0 / static_cast<double>(n - 1);
        v[i] = s2 * inv - (s1 * inv) * (s1 * inv);

        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            std::vector<std::size_t> cand;
            for (std::size_t t = 0; t < n; ++t)
                if (t != i && t != j) cand.push_back(t);
            std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
                const double da = std::abs(xs[a] - xs[j]);
                const double db = std::abs(xs[b] - xs[j]);
                if (da != db) return da < db;
                return tie_priority(tie_seed, j, a) < tie_priority(tie_seed, j, b);
            });
            for (std::size_t r = 0; r < k; ++r) {
                const double diff = brownian(ys[j], ys[i]) - brownian(ys[cand[r]], ys[i]);
                acc += diff * diff;
            }
        }
        e[i] = acc / (2.0 * static_cast<double>(k) * static_cast<double>(n - 1));
    }
    double ratio = 0.0;
    std::size_t retained = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > kDefaultDenominatorFloor) {
            ratio += e[i] / v[i];
            ++retained;
        }
    }
    return 1.0 - ratio / static_cast<double>(retained);
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("constant Y column degenerates") {
    const SampleSet s = make_sample({0, 1, 2, 3, 4, 5}, {2, 2, 2, 2, 2, 2});
    CHECK_THROWS_AS(d_knn(s, KernelSpec::gaussian(1.0), 1, 0), DegenerateVariance);
    CHECK_THROWS_AS(d_rkhs(s, KernelSpec::gaussian(1.0), KernelSpec::gaussian(1.0), 1e-4),
                    DegenerateVariance);
    CHECK_THROWS_AS(eta_knn(s, KernelSpec::gaussian(1.0), 1, 0), DegenerateVariance);
}

TEST_CASE("identity line: matches naive oracle and dominates shuffles") {
    const std::vector<double> vals{1, 2, 3, 4, 5, 6};
    const SampleSet s = make_sample(vals, vals);
    const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(s.y));
    const auto fast = d_knn(s, ky, 1, 42);
    const auto naive = d_knn_naive(s, ky, 1, 42);
    CHECK(std::abs(fast.d_hat - naive.d_hat) <= 1e-10);

    rng::SplitMix64 gen(7);
    double shuffled_mean = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto perm = rng::random_permutation(vals.size(), gen);
        const SampleSet sh(s.x, s.y.permuted(perm));
        shuffled_mean += d_knn(sh, ky, 1, 42).d_hat;
    }
    shuffled_mean /= 50.0;
    CHECK(fast.d_hat > shuffled_mean);
}

TEST_CASE("five-point hand expansion with the Brownian kernel") {
    const std::vector<double> xs{0, 1, 2, 3, 4};
    const std::vector<double> ys{0, 0, 1, 1, 1};
    const SampleSet s = make_sample(xs, ys);
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const double want = hand_knn_d_hat(xs, ys, 1, seed);
        const auto got = d_knn(s, KernelSpec::brownian(), 1, seed);
        CHECK(got.d_hat == doctest::Approx(want).epsilon(1e-12));
        // Indices whose Y value sits at 0 have an all-zero kernel row.
        CHECK(got.dropped_indices == std::vector<std::size_t>{0, 1});
        const auto naive = d_knn_naive(s, KernelSpec::brownian(), 1, seed);
        CHECK(std::abs(got.d_hat - naive.d_hat) <= 1e-10);
    }
}

TEST_CASE("naive estimator guard") {
    const SampleSet s = uniform_sample(501, 3);
    CHECK_THROWS_AS(d_knn_naive(s, KernelSpec::gaussian(1.0), 5, 0), GuardExceeded);
}

TEST_CASE("k-nn preconditions") {
    const SampleSet s = uniform_sample(6, 4);
    CHECK_THROWS_AS(d_knn(s, KernelSpec::gaussian(1.0), 5, 0), InsufficientPoints);
    CHECK_NOTHROW(d_knn(s, KernelSpec::gaussian(1.0), 4, 0));
}

TEST_CASE("tree path equals naive path on random instances") {
    rng::SplitMix64 meta(99);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 20 + static_cast<std::size_t>(meta.next_below(100));
        const SampleSet s = uniform_sample(n, meta.next_u64());
        const std::size_t k = 1 + static_cast<std::size_t>(meta.next_below(5));
        const std::uint64_t seed = meta.next_u64();
        const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(s.y));
        const auto fast = d_knn(s, ky, k, seed);
        const auto naive = d_knn_naive(s, ky, k, seed);
        CHECK(std::abs(fast.d_hat - naive.d_hat) <= 1e-10);
    }
}

TEST_CASE("independence keeps d_hat near zero (knn)") {
    double mean = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const SampleSet sample = uniform_sample(500, 1000 + static_cast<std::uint64_t>(s));
        const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(sample.y));
        mean += d_knn(sample, ky, 5, static_cast<std::uint64_t>(s)).d_hat;
    }
    mean /= seeds;
    CHECK(mean > -0.1);
    CHECK(mean < 0.1);
}

TEST_CASE("rkhs: huge ridge drives d_hat to zero") {
    const SampleSet s = uniform_sample(120, 11);
    const auto kx = KernelSpec::gaussian(median_heuristic_bandwidth(s.x));
    const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(s.y));
    const auto res = d_rkhs(s, kx, ky, 1e9);
    CHECK(std::abs(res.d_hat) <= 1e-3);
    // In the limit the inverse-bearing terms vanish and E matches V
    // entrywise.
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(res.numerators[i] - res.denominators[i]) <=
              1e-3 * res.denominators[i]);
}

TEST_CASE("rkhs matches an explicit-inverse evaluation") {
    rng::SplitMix64 meta(1234);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 4 + static_cast<std::size_t>(meta.next_below(57));
        const SampleSet s = uniform_sample(n, meta.next_u64());
        const double eps = 0.05;
        const auto kx = KernelSpec::gaussian(1.0);
        const auto ky = KernelSpec::gaussian(1.0);

        const Eigen::MatrixXd kxm = gram_matrix(kx, s.x).dense();
        const Eigen::MatrixXd kym = gram_matrix(ky, s.y).dense();
        const auto nn = static_cast<Eigen::Index>(n);
        const double nd = static_cast<double>(n);
        const Eigen::MatrixXd h =
            Eigen::MatrixXd::Identity(nn, nn) - Eigen::MatrixXd::Ones(nn, nn) / nd;
        const Eigen::MatrixXd ktx = h * kxm * h;
        const Eigen::MatrixXd inv =
            (ktx + nd * eps * Eigen::MatrixXd::Identity(nn, nn)).inverse();
        const Eigen::MatrixXd m = kym * ktx * inv;
        const Eigen::MatrixXd kysq = kym.cwiseProduct(kym);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nn);

        double ratio_sum = 0.0;
        for (Eigen::Index i = 0; i < nn; ++i) {
            Eigen::VectorXd ei = Eigen::VectorXd::Zero(nn);
            ei(i) = 1.0;
            const Eigen::VectorXd inner = kysq * ones + kysq * ktx * inv * ones -
                                          kym * ones * ones.transpose() * kym * ei / nd -
                                          2.0 / nd * kym * ones * ones.transpose() *
                                              m.transpose() * ei -
                                          m * m.transpose() * ei;
            const double e_i = ei.dot(inner) / nd;
            const double v_i =
                ones.dot(kysq * ei) / nd - std::pow(ones.dot(kym * ei) / nd, 2);
            ratio_sum += e_i / v_i;
        }
        const double want = 1.0 - ratio_sum / nd;
        const auto got = d_rkhs(s, kx, ky, eps);
        CHECK(got.d_hat == doctest::Approx(want).epsilon(1e-8));
        CHECK(got.dropped_indices.empty());
    }
}

TEST_CASE("rkhs is invariant under joint row permutation") {
    const SampleSet s = uniform_sample(60, 21);
    const auto kx = KernelSpec::gaussian(0.6);
    const auto ky = KernelSpec::gaussian(0.8);
    const double base = d_rkhs(s, kx, ky, 1e-3).d_hat;
    rng::SplitMix64 gen(22);
    for (int rep = 0; rep < 3; ++rep) {
        const auto perm = rng::random_permutation(s.size(), gen);
        const SampleSet sp(s.x.permuted(perm), s.y.permuted(perm));
        CHECK(d_rkhs(sp, kx, ky, 1e-3).d_hat == doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("gaussian kernel with median bandwidth ignores Y translation") {
    const SampleSet s = uniform_sample(80, 33);
    const auto estimate = [](const SampleSet& sample) {
        const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(sample.y));
        return d_knn(sample, ky, 5, 7).d_hat;
    };
    const double base = estimate(s);
    std::vector<double> shifted(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) shifted[i] = s.y.scalar(i) + 5.0;
    const SampleSet st(s.x, PointSet::reals_1d(shifted));
    CHECK(estimate(st) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("xi_n on monotone sequences") {
    // Strictly increasing: ranks 1..5, adjacent gaps 1 -> 1 - 12/24.
    CHECK(xi_n(make_sample({1, 2, 3, 4, 5}, {10, 20, 30, 40, 50})) == doctest::Approx(0.5));
    // Strictly decreasing: same gap structure.
    CHECK(xi_n(make_sample({1, 2, 3, 4, 5}, {50, 40, 30, 20, 10})) == doctest::Approx(0.5));
    // n = 2: single gap of 1 -> 1 - 3/3.
    CHECK(xi_n(make_sample({0, 1}, {3, 7})) == doctest::Approx(0.0));
}

TEST_CASE("xi_n requires scalar data") {
    RealMatrix x(3, 2);
    x.setZero();
    const SampleSet s(PointSet::reals(std::move(x)), PointSet::reals_1d({1, 2, 3}));
    CHECK_THROWS_AS(xi_n(s), NotScalar);
}

TEST_CASE("eta equals d when all per-index denominators coincide") {
    // Alternating +-1 responses give every index the same denominator
    // under the Brownian kernel.
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(i % 2 == 0 ? -1.0 : 1.0);
    }
    const SampleSet s = make_sample(xs, ys);
    const auto d = d_knn(s, KernelSpec::brownian(), 2, 5);
    const auto eta = eta_knn(s, KernelSpec::brownian(), 2, 5);
    const double vmin = *std::min_element(d.denominators.begin(), d.denominators.end());
    const double vmax = *std::max_element(d.denominators.begin(), d.denominators.end());
    REQUIRE(vmax - vmin < 1e-13);
    CHECK(eta.eta_hat == doctest::Approx(d.d_hat).epsilon(1e-12));
}

TEST_CASE("eta stays near zero under independence") {
    double knn_mean = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const SampleSet sample = uniform_sample(400, 9000 + static_cast<std::uint64_t>(s));
        const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(sample.y));
        knn_mean += eta_knn(sample, ky, 5, static_cast<std::uint64_t>(s)).eta_hat;
    }
    knn_mean /= seeds;
    CHECK(knn_mean > -0.1);
    CHECK(knn_mean < 0.1);
}

TEST_CASE("per-index diagnostics are reported") {
    const SampleSet s = uniform_sample(30, 77);
    const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(s.y));
    const auto res = d_knn(s, ky, 3, 1);
    CHECK(res.numerators.size() == 30);
    CHECK(res.denominators.size() == 30);
    CHECK(res.method == "knn");
    CHECK(res.k == 3);
    CHECK(res.d_hat_clamped >= 0.0);
    CHECK(res.d_hat_clamped <= 1.0);
    // d_hat reconstructs from the reported moments.
    double ratio = 0.0;
    for (std::size_t i = 0; i < 30; ++i) ratio += res.numerators[i] / res.denominators[i];
    CHECK(res.d_hat == doctest::Approx(1.0 - ratio / 30.0).epsilon(1e-12));
}

TEST_CASE("strict mode raises on dropped indices") {
    const std::vector<double> xs{0, 1, 2, 3, 4};
    const std::vector<double> ys{0, 0, 1, 1, 1};
    const SampleSet s = make_sample(xs, ys);
    CHECK_THROWS_AS(
        d_knn(s, KernelSpec::brownian(), 1, 0, kDefaultDenominatorFloor, /*strict=*/true),
        DegenerateVariance);
}

}  // TEST_SUITE
