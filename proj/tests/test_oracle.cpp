#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "kir/errors.hpp"
#include "kir/kernels.hpp"
#include "kir/oracle.hpp"
#include "kir/rng.hpp"

using namespace kir;

namespace {

DiscreteJoint make_joint(const std::vector<std::vector<double>>& probs,
                         const std::vector<double>& y_points) {
    const auto nx = static_cast<Eigen::Index>(probs.size());
    const auto ny = static_cast<Eigen::Index>(y_points.size());
    Eigen::MatrixXd p(nx, ny);
    std::vector<std::string> labels;
    for (Eigen::Index a = 0; a < nx; ++a) {
        labels.push_back("x" + std::to_string(a));
        for (Eigen::Index b = 0; b < ny; ++b) p(a, b) = probs[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    return DiscreteJoint(std::move(labels), PointSet::reals_1d(y_points), std::move(p));
}

// Golden joint: P = [[0.4, 0.1], [0.1, 0.4]], y in {-1, +1}, Brownian
// kernel. Both population routes give exactly 9/25; eta coincides here
// because the two per-y normalizers happen to be equal.
const double kGoldenD = 0.36;

DiscreteJoint golden_joint() {
    return make_joint({{0.4, 0.1}, {0.1, 0.4}}, {-1.0, 1.0});
}

// Random nondegenerate joint for property tests.
DiscreteJoint random_joint(rng::SplitMix64& gen) {
    const std::size_t nx = 2 + static_cast<std::size_t>(gen.next_below(5));
    const std::size_t ny = 2 + static_cast<std::size_t>(gen.next_below(5));
    Eigen::MatrixXd p(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
    double total = 0.0;
    for (Eigen::Index a = 0; a < p.rows(); ++a)
        for (Eigen::Index b = 0; b < p.cols(); ++b) {
            p(a, b) = 0.05 + gen.next_double();
            total += p(a, b);
        }
    p /= total;
    std::vector<double> ys;
    std::vector<std::string> labels;
    for (std::size_t b = 0; b < ny; ++b)
        ys.push_back(static_cast<double>(b) + 0.3 * gen.next_double());
    for (std::size_t a = 0; a < nx; ++a) labels.push_back("x" + std::to_string(a));
    return DiscreteJoint(std::move(labels), PointSet::reals_1d(ys), std::move(p));
}

KernelSpec random_kernel(rng::SplitMix64& gen) {
    if (gen.next_below(3) == 0) return KernelSpec::brownian();
    return KernelSpec::gaussian(0.3 + 2.7 * gen.next_double());
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("joint invariants are validated") {
    CHECK_THROWS_AS(make_joint({{0.6, 0.5}, {0.1, 0.1}}, {0.0, 1.0}), DimensionMismatch);
    CHECK_THROWS_AS(make_joint({{0.5, -0.1}, {0.3, 0.3}}, {0.0, 1.0}), DimensionMismatch);
    // Zero column mass.
    CHECK_THROWS_AS(make_joint({{0.5, 0.0}, {0.5, 0.0}}, {0.0, 1.0}), DimensionMismatch);
}

TEST_CASE("product joint has zero dependence") {
    const auto joint = make_joint({{0.12, 0.18, 0.30}, {0.08, 0.12, 0.20}}, {0.0, 1.0, 2.5});
    const auto kernel = KernelSpec::gaussian(1.0);
    CHECK(population_d_discrete(joint, kernel) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(population_d_alt_discrete(joint, kernel) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(population_eta_discrete(joint, kernel) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("deterministic joint has full dependence") {
    const auto joint =
        make_joint({{0.3, 0.0, 0.0}, {0.0, 0.5, 0.0}, {0.0, 0.0, 0.2}}, {0.0, 1.0, 2.0});
    const auto kernel = KernelSpec::gaussian(1.0);
    CHECK(population_d_discrete(joint, kernel) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(population_d_alt_discrete(joint, kernel) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(population_eta_discrete(joint, kernel) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("golden joint values") {
    const auto joint = golden_joint();
    const auto kernel = KernelSpec::brownian();
    CHECK(population_d_discrete(joint, kernel) == doctest::Approx(kGoldenD).epsilon(1e-12));
    CHECK(population_d_alt_discrete(joint, kernel) ==
          doctest::Approx(kGoldenD).epsilon(1e-12));
    CHECK(population_eta_discrete(joint, kernel) == doctest::Approx(kGoldenD).epsilon(1e-12));
}

TEST_CASE("brownian kernel with 0 in the alphabet is degenerate") {
    // k(., 0) vanishes identically, so V_Y[k(Y, 0)] = 0.
    const auto joint = make_joint({{0.4, 0.1}, {0.1, 0.4}}, {0.0, 1.0});
    CHECK_THROWS_AS(population_d_discrete(joint, KernelSpec::brownian()),
                    DegeneratePopulationVariance);
    CHECK_THROWS_AS(population_d_alt_discrete(joint, KernelSpec::brownian()),
                    DegeneratePopulationVariance);
}

TEST_CASE("asymmetric joint separates local and global normalization") {
    const auto joint = make_joint({{0.5, 0.1, 0.0}, {0.0, 0.1, 0.3}}, {-1.0, 1.0, 2.0});
    const auto kernel = KernelSpec::brownian();
    CHECK(population_d_discrete(joint, kernel) ==
          doctest::Approx(169.0 / 240.0).epsilon(1e-12));
    CHECK(population_eta_discrete(joint, kernel) ==
          doctest::Approx(281.0 / 426.0).epsilon(1e-12));
    CHECK(std::abs(population_d_discrete(joint, kernel) -
                   population_eta_discrete(joint, kernel)) > 0.01);
}

TEST_CASE("both population routes agree on random joints") {
    rng::SplitMix64 gen(404);
    int done = 0;
    while (done < 50) {
        const auto joint = random_joint(gen);
        const auto kernel = random_kernel(gen);
        double d_main = 0.0;
        try {
            d_main = population_d_discrete(joint, kernel);
        } catch (const DegeneratePopulationVariance&) {
            continue;
        }
        const double d_alt = population_d_alt_discrete(joint, kernel);
        CHECK(std::abs(d_main - d_alt) <= 1e-10);
        CHECK(d_main >= -1e-12);
        CHECK(d_main <= 1.0 + 1e-12);
        ++done;
    }
}

TEST_CASE("mixing the golden joint toward independence degrades D") {
    const auto kernel = KernelSpec::brownian();
    const Eigen::MatrixXd p0 = golden_joint().probs();
    const Eigen::VectorXd px = p0.rowwise().sum();
    const Eigen::VectorXd py = p0.colwise().sum();
    const Eigen::MatrixXd prod = px * py.transpose();
    double prev = 2.0;
    for (int step = 0; step <= 10; ++step) {
        const double w = static_cast<double>(step) / 10.0;
        const Eigen::MatrixXd mix = (1.0 - w) * p0 + w * prod;
        const auto joint = DiscreteJoint({"a", "b"}, PointSet::reals_1d({-1.0, 1.0}), mix);
        const double d = population_d_discrete(joint, kernel);
        CHECK(d <= prev + 1e-12);
        prev = d;
    }
    CHECK(prev == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sampling: point mass cell") {
    const auto joint = make_joint({{1.0 - 1e-13, 0.0}, {0.0, 1e-13}}, {5.0, 9.0});
    const auto sample = sample_from_joint(joint, 64, 3);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        CHECK(sample.x.scalar(i) == 0.0);
        CHECK(sample.y.scalar(i) == 5.0);
    }
}

TEST_CASE("sampling: uniform 2x2 frequencies and chi-square sanity") {
    const auto joint = make_joint({{0.25, 0.25}, {0.25, 0.25}}, {0.0, 1.0});
    const std::size_t n = 100000;
    const auto sample = sample_from_joint(joint, n, 99);
    double counts[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(sample.x.scalar(i));
        const auto b = sample.y.scalar(i) > 0.5 ? 1u : 0u;
        counts[a][b] += 1.0;
    }
    const double expected = static_cast<double>(n) / 4.0;
    double chi_sq = 0.0;
    for (auto& row : counts)
        for (double c : row) {
            CHECK(std::abs(c / static_cast<double>(n) - 0.25) < 0.01);
            chi_sq += (c - expected) * (c - expected) / expected;
        }
    // df = 3 critical value at alpha = 0.001.
    CHECK(chi_sq < 16.266);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
    const auto joint = golden_joint();
    const auto a = sample_from_joint(joint, 200, 7);
    const auto b = sample_from_joint(joint, 200, 7);
    for (std::size_t i = 0; i < 200; ++i) {
        CHECK(a.x.scalar(i) == b.x.scalar(i));
        CHECK(a.y.scalar(i) == b.y.scalar(i));
    }
}

TEST_CASE("json round trip") {
    const nlohmann::json doc = {{"x_labels", {"a", "b"}},
                                {"y_points", {-1.0, 1.0}},
                                {"probs", {{0.4, 0.1}, {0.1, 0.4}}}};
    const auto joint = DiscreteJoint::from_json(doc);
    CHECK(joint.x_size() == 2);
    CHECK(joint.y_size() == 2);
    CHECK(population_d_discrete(joint, KernelSpec::brownian()) ==
          doctest::Approx(kGoldenD).epsilon(1e-12));

    nlohmann::json bad = doc;
    bad.erase("probs");
    CHECK_THROWS_AS(DiscreteJoint::from_json(bad), ParseError);
}

}  // TEST_SUITE
