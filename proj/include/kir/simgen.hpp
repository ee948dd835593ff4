#pragma once

#include <cstdint>
#include <string>

#include "kir/points.hpp"

namespace kir {

// Rotation about the x-axis (acts in the y-z plane).
Rotation3 rotation_r1(double angle);
// Rotation about the z-axis (acts in the x-y plane).
Rotation3 rotation_r3(double angle);

// X ~ Uniform[-1, 1], eps ~ N(0, 1) independent,
// Y = 3 (sigma(X) (1 - lambda) + lambda) eps with sigma(X) = 1{|X| <= 0.5}.
// lambda = 1 makes Y independent of X; lambda = 0 makes Y vanish off the
// band |X| <= 0.5.
SampleSet gen_heteroscedastic(std::size_t n, double lambda, std::uint64_t seed);

// X ~ N(0, I_3), eps1, eps2 ~ N(0, 1) i.i.d.,
// Y = R1(X_1 + lambda eps1) R3(X_2 X_3 + lambda eps2) in SO(3).
SampleSet gen_so3(std::size_t n, double lambda, std::uint64_t seed);

// Desk-scale regression-style scenario: X standard normal in R^90,
// Y = sum_{j=1}^{5} sin(X_j) + 0.5 eps, then Y standardized to mean 0,
// variance 1 (population convention). Only a 5-dimensional active
// subspace of X carries signal. lambda is ignored.
SampleSet gen_synthetic_song(std::size_t n, std::uint64_t seed);

enum class Scenario { Heteroscedastic, SO3, SyntheticSong };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

struct ScenarioConfig {
    Scenario scenario = Scenario::Heteroscedastic;
    std::size_t n = 0;
    double lambda = 0.0;  // in [0, 1]
    std::uint64_t seed = 0;
};

SampleSet generate(const ScenarioConfig& config);

}  // namespace kir
