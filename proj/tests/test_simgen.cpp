#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kir/estimators.hpp"
#include "kir/kernels.hpp"
#include "kir/rng.hpp"
#include "kir/simgen.hpp"

using namespace kir;

TEST_SUITE("simgen") {

TEST_CASE("rotation constructors") {
    CHECK((rotation_r3(0.0).matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-15);

    // R1(pi/2) maps e2 to e3.
    const Eigen::Vector3d e2(0, 1, 0);
    const Eigen::Vector3d mapped = rotation_r1(std::numbers::pi / 2.0).matrix() * e2;
    CHECK(mapped(0) == doctest::Approx(0.0));
    CHECK(mapped(1) == doctest::Approx(0.0));
    CHECK(mapped(2) == doctest::Approx(1.0));

    const Eigen::Matrix3d prod =
        rotation_r3(0.7).matrix() * rotation_r3(-0.7).matrix();
    CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("heteroscedastic: lambda 0 kills Y outside the band") {
    const auto s = gen_heteroscedastic(2000, 0.0, 5);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.x.scalar(i) >= -1.0);
        CHECK(s.x.scalar(i) <= 1.0);
        if (std::abs(s.x.scalar(i)) > 0.5) CHECK(s.y.scalar(i) == 0.0);
    }
}

TEST_CASE("heteroscedastic: variance inside the band is about 9") {
    const auto s = gen_heteroscedastic(100000, 0.0, 17);
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(s.x.scalar(i)) <= 0.5) {
            sum += s.y.scalar(i);
            sum_sq += s.y.scalar(i) * s.y.scalar(i);
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sum_sq / static_cast<double>(count) - mean * mean;
    CHECK(var == doctest::Approx(9.0).epsilon(0.05));
}

TEST_CASE("heteroscedastic: lambda validation and determinism") {
    CHECK_THROWS(gen_heteroscedastic(10, 1.5, 0));
    const auto a = gen_heteroscedastic(50, 0.3, 9);
    const auto b = gen_heteroscedastic(50, 0.3, 9);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(a.x.scalar(i) == b.x.scalar(i));
        CHECK(a.y.scalar(i) == b.y.scalar(i));
    }
}

TEST_CASE("so3: outputs are valid rotations with unit determinant") {
    const auto s = gen_so3(200, 0.4, 23);
    for (const auto& r : s.y.rotation_list()) {
        CHECK(std::abs(r.matrix().determinant() - 1.0) < 1e-9);
        CHECK((r.matrix().transpose() * r.matrix() - Eigen::Matrix3d::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
}

TEST_CASE("so3: lambda 0 is the deterministic product") {
    const auto s = gen_so3(50, 0.0, 31);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& x = s.x.real_matrix();
        const auto r = static_cast<Eigen::Index>(i);
        const Eigen::Matrix3d want =
            rotation_r1(x(r, 0)).matrix() * rotation_r3(x(r, 1) * x(r, 2)).matrix();
        CHECK((s.y.rotation_list()[i].matrix() - want).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("so3: fixed seed reproduces the matrix list") {
    const auto a = gen_so3(40, 0.7, 3);
    const auto b = gen_so3(40, 0.7, 3);
    for (std::size_t i = 0; i < 40; ++i)
        CHECK((a.y.rotation_list()[i].matrix() - b.y.rotation_list()[i].matrix())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

TEST_CASE("synthetic song: standardized response on the active subspace") {
    const auto s = gen_synthetic_song(20000, 111);
    CHECK(s.x.dim() == 90);
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) mean += s.y.scalar(i);
    mean /= static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        var += (s.y.scalar(i) - mean) * (s.y.scalar(i) - mean);
    var /= static_cast<double>(s.size());
    CHECK(std::abs(mean) <= 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));

    // Signal lives in the first five coordinates only: correlation of Y
    // with sin(X_j) is bounded away from zero there and near zero beyond.
    const auto& x = s.x.real_matrix();
    for (Eigen::Index j : {Eigen::Index{0}, Eigen::Index{4}, Eigen::Index{5},
                           Eigen::Index{60}}) {
        double cov = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            cov += std::sin(x(i, j)) * s.y.scalar(static_cast<std::size_t>(i));
        cov /= static_cast<double>(x.rows());
        if (j < 5)
            CHECK(cov > 0.1);
        else
            CHECK(std::abs(cov) < 0.05);
    }
}

TEST_CASE("synthetic song carries detectable signal at n = 1000") {
    // The estimate on real pairs beats the estimate after breaking the
    // pairing, for every seed.
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto sample = gen_synthetic_song(1000, 5000 + s);
        const auto ky = KernelSpec::gaussian(median_heuristic_bandwidth(sample.y));
        const double paired = d_knn(sample, ky, 5, s).d_hat;
        rng::SplitMix64 gen(6000 + s);
        const auto perm = rng::random_permutation(sample.size(), gen);
        const SampleSet broken(sample.x, sample.y.permuted(perm));
        const double shuffled = d_knn(broken, ky, 5, s).d_hat;
        CHECK(paired > shuffled);
    }
}

TEST_CASE("normal generator moments") {
    rng::SplitMix64 gen(2718);
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng::next_normal(gen);
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 0.01);
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m4 == doctest::Approx(3.0).epsilon(0.06));
}

TEST_CASE("scenario dispatch") {
    CHECK(scenario_from_name("heteroscedastic") == Scenario::Heteroscedastic);
    CHECK(scenario_from_name("so3") == Scenario::SO3);
    CHECK(scenario_from_name("synthetic-song") == Scenario::SyntheticSong);
    CHECK_THROWS(scenario_from_name("nope"));

    ScenarioConfig conf;
    conf.scenario = Scenario::SO3;
    conf.n = 10;
    conf.lambda = 0.2;
    conf.seed = 1;
    const auto s = generate(conf);
    CHECK(s.size() == 10);
    CHECK(s.y.kind() == PointKind::Rotation);
}

}  // TEST_SUITE
