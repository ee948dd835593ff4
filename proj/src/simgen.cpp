#include "kir/simgen.hpp"

#include <cmath>

#include "kir/errors.hpp"
#include "kir/rng.hpp"

namespace kir {

Rotation3 rotation_r1(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix3d m;
    m << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return Rotation3::from_matrix(m);
}

Rotation3 rotation_r3(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix3d m;
    m << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return Rotation3::from_matrix(m);
}

namespace {

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidConfig("lambda must lie in [0, 1]");
}

}  // namespace

SampleSet gen_heteroscedastic(std::size_t n, double lambda, std::uint64_t seed) {
    check_lambda(lambda);
    rng::SplitMix64 gen(seed);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 2.0 * gen.next_double() - 1.0;
        const double eps = rng::next_normal(gen);
        const double sigma = std::abs(x[i]) <= 0.5 ? 1.0 : 0.0;
        y[i] = 3.0 * (sigma * (1.0 - lambda) + lambda) * eps;
    }
    return SampleSet(PointSet::reals_1d(x), PointSet::reals_1d(y));
}

SampleSet gen_so3(std::size_t n, double lambda, std::uint64_t seed) {
    check_lambda(lambda);
    rng::SplitMix64 gen(seed);
    RealMatrix x(static_cast<Eigen::Index>(n), 3);
    std::vector<Rotation3> y;
    y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng::next_normal(gen);
        const double x2 = rng::next_normal(gen);
        const double x3 = rng::next_normal(gen);
        const double eps1 = rng::next_normal(gen);
        const double eps2 = rng::next_normal(gen);
        const auto r = static_cast<Eigen::Index>(i);
        x(r, 0) = x1;
        x(r, 1) = x2;
        x(r, 2) = x3;
        const Eigen::Matrix3d prod = rotation_r1(x1 + lambda * eps1).matrix() *
                                     rotation_r3(x2 * x3 + lambda * eps2).matrix();
        y.push_back(Rotation3::from_matrix(prod));
    }
    return SampleSet(PointSet::reals(std::move(x)), PointSet::rotations(std::move(y)));
}

SampleSet gen_synthetic_song(std::size_t n, std::uint64_t seed) {
    constexpr Eigen::Index kDim = 90;
    constexpr std::size_t kActive = 5;
    rng::SplitMix64 gen(seed);
    RealMatrix x(static_cast<Eigen::Index>(n), kDim);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < kDim; ++j) x(r, j) = rng::next_normal(gen);
        double signal = 0.0;
        for (std::size_t j = 0; j < kActive; ++j)
            signal += std::sin(x(r, static_cast<Eigen::Index>(j)));
        y[i] = signal + 0.5 * rng::next_normal(gen);
    }
    // Standardize the response (population variance convention).
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (double& v : y) v = sd > 0.0 ? (v - mean) / sd : 0.0;
    return SampleSet(PointSet::reals(std::move(x)), PointSet::reals_1d(y));
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "heteroscedastic") return Scenario::Heteroscedastic;
    if (name == "so3") return Scenario::SO3;
    if (name == "synthetic-song") return Scenario::SyntheticSong;
    throw InvalidConfig("unknown scenario '" + name +
                        "' (expected heteroscedastic, so3, or synthetic-song)");
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Heteroscedastic: return "heteroscedastic";
        case Scenario::SO3: return "so3";
        case Scenario::SyntheticSong: return "synthetic-song";
    }
    return "unknown";
}

SampleSet generate(const ScenarioConfig& config) {
    switch (config.scenario) {
        case Scenario::Heteroscedastic:
            return gen_heteroscedastic(config.n, config.lambda, config.seed);
        case Scenario::SO3:
            return gen_so3(config.n, config.lambda, config.seed);
        case Scenario::SyntheticSong:
            return gen_synthetic_song(config.n, config.seed);
    }
    throw InvalidConfig("unknown scenario");
}

}  // namespace kir
