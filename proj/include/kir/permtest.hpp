#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kir/points.hpp"

namespace kir {

using Statistic = std::function<double(const SampleSet&)>;

struct PermutationTestResult {
    double observed_stat = 0.0;
    std::vector<double> permutation_stats;  // length B
    double p_value = 1.0;                   // (1 + #{perm >= observed}) / (1 + B)
    std::size_t b = 0;
    std::uint64_t seed = 0;
};

// Permutation independence test. Each of the B replicates applies an
// independent seeded random permutation to the X side only (the Y side
// and both marginals stay fixed) and re-evaluates the statistic. The
// p-value uses the add-one convention, which is a valid finite-sample
// p-value. Replicate b draws from the substream derive(seed, b), so the
// result does not depend on worker scheduling. A statistic error on a
// permuted dataset aborts the test.
PermutationTestResult permutation_test(const Statistic& statistic, const SampleSet& sample,
                                       std::size_t b, std::uint64_t seed);

struct PowerEstimate {
    std::string scenario;
    std::string statistic;
    std::size_t n = 0;
    double lambda = 0.0;
    double alpha = 0.05;
    std::size_t replications = 0;
    std::size_t rejections = 0;
    double power = 0.0;           // rejections / replications
    double standard_error = 0.0;  // sqrt(power (1 - power) / replications)
    std::uint64_t seed = 0;
};

using ScenarioGenerator =
    std::function<SampleSet(std::size_t n, double lambda, std::uint64_t seed)>;

// R independent datasets from the generator at noise level lambda, each
// run through permutation_test with B permutations; power is the fraction
// of p-values at or below alpha. Dataset r uses data substream
// derive(seed, r, 0) and test substream derive(seed, r, 1) — permutations
// depend only on (seed, r, b), so comparing two statistics under the same
// seed shares datasets and permutations.
PowerEstimate power_estimate(const ScenarioGenerator& generator, const Statistic& statistic,
                             std::size_t n, double lambda, std::size_t replications,
                             std::size_t b, double alpha, std::uint64_t seed,
                             const std::string& scenario_id = "",
                             const std::string& statistic_id = "");

}  // namespace kir
