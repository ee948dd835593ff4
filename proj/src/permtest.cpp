#include "kir/permtest.hpp"

#include <cmath>

#include "kir/errors.hpp"
#include "kir/parallel.hpp"
#include "kir/rng.hpp"

namespace kir {

namespace {

constexpr std::uint64_t kDataSub = 0;
constexpr std::uint64_t kTestSub = 1;

}  // namespace

PermutationTestResult permutation_test(const Statistic& statistic, const SampleSet& sample,
                                       std::size_t b, std::uint64_t seed) {
    if (b < 1) throw InvalidConfig("permutation count B must be at least 1");
    PermutationTestResult res;
    res.b = b;
    res.seed = seed;
    res.observed_stat = statistic(sample);
    res.permutation_stats.assign(b, 0.0);

    parallel_for(0, b, [&](std::size_t rep) {
        rng::SplitMix64 gen(rng::derive(seed, rep));
        const auto perm = rng::random_permutation(sample.size(), gen);
        const SampleSet shuffled(sample.x.permuted(perm), sample.y);
        res.permutation_stats[rep] = statistic(shuffled);
    });

    std::size_t geq = 0;
    for (double s : res.permutation_stats)
        if (s >= res.observed_stat) ++geq;
    res.p_value = static_cast<double>(1 + geq) / static_cast<double>(1 + b);
    return res;
}

PowerEstimate power_estimate(const ScenarioGenerator& generator, const Statistic& statistic,
                             std::size_t n, double lambda, std::size_t replications,
                             std::size_t b, double alpha, std::uint64_t seed,
                             const std::string& scenario_id, const std::string& statistic_id) {
    if (replications < 1) throw InvalidConfig("replication count R must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must lie in (0, 1)");

    std::vector<char> rejected(replications, 0);
    parallel_for(0, replications, [&](std::size_t r) {
        const SampleSet data = generator(n, lambda, rng::derive(seed, r, kDataSub));
        const auto test = permutation_test(statistic, data, b, rng::derive(seed, r, kTestSub));
        rejected[r] = test.p_value <= alpha ? 1 : 0;
    });

    PowerEstimate est;
    est.scenario = scenario_id;
    est.statistic = statistic_id;
    est.n = n;
    est.lambda = lambda;
    est.alpha = alpha;
    est.replications = replications;
    for (char c : rejected) est.rejections += static_cast<std::size_t>(c);
    est.power = static_cast<double>(est.rejections) / static_cast<double>(replications);
    est.standard_error =
        std::sqrt(est.power * (1.0 - est.power) / static_cast<double>(replications));
    est.seed = seed;
    return est;
}

}  // namespace kir
