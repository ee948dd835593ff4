#include "kir/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kir/csv.hpp"
#include "kir/errors.hpp"
#include "kir/estimators.hpp"
#include "kir/kernels.hpp"
#include "kir/neighbours.hpp"
#include "kir/oracle.hpp"
#include "kir/permtest.hpp"
#include "kir/rng.hpp"
#include "kir/simgen.hpp"

namespace kir {

namespace {

using nlohmann::json;

constexpr std::uint64_t kStatStream = 0x57a7;
constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kTestStream = 0x7e57;

json config_json(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["input"] = c.input_path;
    j["scenario"] = c.scenario;
    j["x_cols"] = c.x_cols;
    j["y_cols"] = c.y_cols;
    j["y_kind"] = c.y_kind;
    j["standardize"] = c.standardize;
    j["method"] = c.method;
    j["kernel_x"] = c.kernel_x;
    j["kernel_y"] = c.kernel_y;
    j["bandwidth"] = c.bandwidth;
    j["k"] = c.k;
    j["epsilon"] = c.epsilon;
    j["permutations"] = c.permutations;
    j["replications"] = c.replications;
    j["alpha"] = c.alpha;
    j["lambda"] = c.lambda;
    j["lambda_grid"] = c.lambda_grid;
    j["n"] = c.n_values;
    j["seed"] = c.seed;
    j["output"] = c.output_path;
    j["format"] = c.format;
    return j;
}

bool is_known_method(const std::string& m) {
    return m == "knn" || m == "rkhs" || m == "xi" || m == "eta-knn" || m == "eta-rkhs";
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidConfig(what + " is not a number: '" + s + "'");
    }
}

KernelSpec resolve_kernel(const std::string& name, const std::string& bandwidth,
                          const PointSet& pts) {
    if (name == "so3") {
        if (pts.kind() != PointKind::Rotation)
            throw InvalidConfig("so3 kernel requires rotation-valued points");
        return KernelSpec::so3();
    }
    if (pts.kind() != PointKind::Real)
        throw InvalidConfig("kernel '" + name + "' requires real-vector points");
    if (name == "brownian") return KernelSpec::brownian();
    if (name == "gaussian") {
        const double bw = bandwidth == "median" ? median_heuristic_bandwidth(pts)
                                                : parse_double(bandwidth, "--bandwidth");
        return KernelSpec::gaussian(bw);
    }
    throw InvalidConfig("unknown kernel '" + name + "' (expected gaussian, brownian, or so3)");
}

std::size_t single_n(const RunConfig& c) {
    if (c.n_values.size() != 1)
        throw InvalidConfig("this subcommand needs exactly one --n value");
    return c.n_values.front();
}

SampleSet load_input_sample(const RunConfig& c) {
    if (!c.input_path.empty())
        return load_csv(c.input_path, c.x_cols, c.y_cols, c.y_kind, c.standardize);
    ScenarioConfig sc;
    sc.scenario = scenario_from_name(c.scenario);
    sc.n = single_n(c);
    sc.lambda = c.lambda;
    sc.seed = rng::derive(c.seed, kDataStream);
    return generate(sc);
}

// The statistic resolves kernels per dataset, so median bandwidths track
// each replicate. X-only permutations leave the distance multisets of
// both sides unchanged, hence median bandwidths are stable across the
// permuted copies of one dataset.
Statistic make_statistic(const RunConfig& c) {
    const std::uint64_t stat_seed = rng::derive(c.seed, kStatStream);
    const std::string method = c.method;
    const std::string kernel_x = c.kernel_x;
    const std::string kernel_y = c.kernel_y;
    const std::string bandwidth = c.bandwidth;
    const std::size_t k = c.k;
    const double epsilon = c.epsilon;

    if (method == "xi")
        return [stat_seed](const SampleSet& s) { return xi_n(s, stat_seed); };
    if (method == "knn")
        return [=](const SampleSet& s) {
            return d_knn(s, resolve_kernel(kernel_y, bandwidth, s.y), k, stat_seed).d_hat;
        };
    if (method == "eta-knn")
        return [=](const SampleSet& s) {
            return eta_knn(s, resolve_kernel(kernel_y, bandwidth, s.y), k, stat_seed).eta_hat;
        };
    if (method == "rkhs")
        return [=](const SampleSet& s) {
            return d_rkhs(s, resolve_kernel(kernel_x, bandwidth, s.x),
                          resolve_kernel(kernel_y, bandwidth, s.y), epsilon)
                .d_hat;
        };
    if (method == "eta-rkhs")
        return [=](const SampleSet& s) {
            return eta_rkhs(s, resolve_kernel(kernel_x, bandwidth, s.x),
                            resolve_kernel(kernel_y, bandwidth, s.y), epsilon)
                .eta_hat;
        };
    throw InvalidConfig("unknown method '" + method + "'");
}

json estimator_result_json(const EstimatorResult& r) {
    json j;
    j["method"] = r.method;
    j["d_hat"] = r.d_hat;
    j["d_hat_clamped"] = r.d_hat_clamped;
    j["numerators"] = r.numerators;
    j["denominators"] = r.denominators;
    j["dropped_indices"] = r.dropped_indices;
    j["denominator_floor"] = r.denominator_floor;
    if (r.method == "knn" || r.method == "knn-naive") j["k"] = r.k;
    if (r.method == "rkhs") j["epsilon"] = r.epsilon;
    return j;
}

ScenarioGenerator make_generator(const std::string& scenario_name_str) {
    const Scenario sc = scenario_from_name(scenario_name_str);
    return [sc](std::size_t n, double lambda, std::uint64_t seed) {
        ScenarioConfig conf;
        conf.scenario = sc;
        conf.n = n;
        conf.lambda = lambda;
        conf.seed = seed;
        return generate(conf);
    };
}

}  // namespace

void validate_config(const RunConfig& c) {
    const bool has_input = !c.input_path.empty();
    const bool has_scenario = !c.scenario.empty();
    if (c.subcommand == "oracle") {
        if (!has_input) throw InvalidConfig("oracle needs --input pointing to a joint JSON file");
        return;
    }
    if (has_input == has_scenario)
        throw InvalidConfig("exactly one of --input and --scenario must be given");
    if (has_input && (c.x_cols.empty() || c.y_cols.empty()))
        throw InvalidConfig("--input requires --x-cols and --y-cols");
    if ((c.subcommand == "power" || c.subcommand == "bench") && !has_scenario)
        throw InvalidConfig(c.subcommand + " runs on a --scenario");
    if (!is_known_method(c.method))
        throw InvalidConfig("unknown method '" + c.method +
                            "' (expected knn, rkhs, xi, eta-knn, eta-rkhs)");
    if (c.k == 0) throw InvalidConfig("--k must be at least 1");
    if (!(c.epsilon > 0.0)) throw InvalidConfig("--epsilon must be positive");
    if (c.permutations < 1) throw InvalidConfig("--permutations must be at least 1");
    if (c.replications < 1) throw InvalidConfig("--replications must be at least 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InvalidConfig("--alpha must lie in (0, 1)");
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw InvalidConfig("--lambda must lie in [0, 1]");
    for (double l : c.lambda_grid)
        if (!(l >= 0.0 && l <= 1.0)) throw InvalidConfig("--lambda-grid values must lie in [0, 1]");
    if (has_scenario && c.n_values.empty())
        throw InvalidConfig("--scenario requires --n");
    for (std::size_t n : c.n_values)
        if (n < 1) throw InvalidConfig("--n values must be at least 1");
    if (c.format != "json" && c.format != "csv")
        throw InvalidConfig("--format must be json or csv");
    if (c.format == "csv" && c.subcommand != "power")
        throw InvalidConfig("CSV output is only available for power curves");
}

json run_estimate(const RunConfig& c) {
    validate_config(c);
    const SampleSet sample = load_input_sample(c);
    const std::uint64_t stat_seed = rng::derive(c.seed, kStatStream);

    json result;
    if (c.method == "knn" || c.method == "rkhs") {
        EstimatorResult r =
            c.method == "knn"
                ? d_knn(sample, resolve_kernel(c.kernel_y, c.bandwidth, sample.y), c.k,
                        stat_seed)
                : d_rkhs(sample, resolve_kernel(c.kernel_x, c.bandwidth, sample.x),
                         resolve_kernel(c.kernel_y, c.bandwidth, sample.y), c.epsilon);
        result = estimator_result_json(r);
        if (c.method == "knn") {
            const VpTree tree(sample.x, rng::derive(stat_seed, 1));
            const auto table = build_neighbour_table(tree, c.k, rng::derive(stat_seed, 2));
            const auto diag = in_degree_diagnostic(table, sample.size());
            result["in_degree"] = {{"max", diag.max_in_degree},
                                   {"max_over_k", diag.max_over_k},
                                   {"exceeds_soft_bound", diag.exceeds_soft_bound}};
        }
    } else if (c.method == "xi") {
        result["method"] = "xi";
        result["xi_n"] = xi_n(sample, stat_seed);
    } else {
        const EtaResult r =
            c.method == "eta-knn"
                ? eta_knn(sample, resolve_kernel(c.kernel_y, c.bandwidth, sample.y), c.k,
                          stat_seed)
                : eta_rkhs(sample, resolve_kernel(c.kernel_x, c.bandwidth, sample.x),
                           resolve_kernel(c.kernel_y, c.bandwidth, sample.y), c.epsilon);
        result["method"] = r.method;
        result["eta_hat"] = r.eta_hat;
        result["eta_hat_clamped"] = r.eta_hat_clamped;
    }
    result["n"] = sample.size();

    json report;
    report["config"] = config_json(c);
    report["result"] = result;
    return report;
}

json run_test(const RunConfig& c) {
    validate_config(c);
    const SampleSet sample = load_input_sample(c);
    const auto statistic = make_statistic(c);
    const auto res = permutation_test(statistic, sample, c.permutations,
                                      rng::derive(c.seed, kTestStream));

    json result;
    result["observed_stat"] = res.observed_stat;
    result["p_value"] = res.p_value;
    result["permutations"] = res.b;
    result["permutation_stats"] = res.permutation_stats;
    result["n"] = sample.size();

    json report;
    report["config"] = config_json(c);
    report["result"] = result;
    return report;
}

json run_power(const RunConfig& c) {
    validate_config(c);
    const std::size_t n = single_n(c);
    const auto generator = make_generator(c.scenario);
    const auto statistic = make_statistic(c);
    const std::vector<double> grid =
        c.lambda_grid.empty() ? std::vector<double>{c.lambda} : c.lambda_grid;

    json points = json::array();
    for (double lambda : grid) {
        const auto est = power_estimate(generator, statistic, n, lambda, c.replications,
                                        c.permutations, c.alpha, c.seed, c.scenario, c.method);
        json p;
        p["lambda"] = est.lambda;
        p["statistic"] = est.statistic;
        p["scenario"] = est.scenario;
        p["n"] = est.n;
        p["alpha"] = est.alpha;
        p["replications"] = est.replications;
        p["rejections"] = est.rejections;
        p["power"] = est.power;
        p["standard_error"] = est.standard_error;
        points.push_back(std::move(p));
    }

    json report;
    report["config"] = config_json(c);
    report["result"] = {{"points", points}};
    return report;
}

json run_bench(const RunConfig& c) {
    validate_config(c);
    if (c.n_values.empty()) throw InvalidConfig("bench needs an --n grid");
    const auto generator = make_generator(c.scenario);
    const auto statistic = make_statistic(c);
    constexpr int kTimedReps = 3;

    json points = json::array();
    std::vector<double> log_n, log_t;
    for (std::size_t n : c.n_values) {
        const SampleSet data = generator(n, c.lambda, rng::derive(c.seed, kDataStream, n));
        (void)statistic(data);  // warm-up
        std::vector<double> secs;
        for (int rep = 0; rep < kTimedReps; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)statistic(data);
            const auto t1 = std::chrono::steady_clock::now();
            secs.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        std::vector<double> sorted = secs;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        json p;
        p["n"] = n;
        p["seconds"] = secs;
        p["median_seconds"] = median;
        points.push_back(std::move(p));
        log_n.push_back(std::log(static_cast<double>(n)));
        log_t.push_back(std::log(median));
    }

    // Least-squares slope of log t against log n.
    double slope = 0.0;
    if (log_n.size() >= 2) {
        const double n_count = static_cast<double>(log_n.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            mx += log_n[i];
            my += log_t[i];
        }
        mx /= n_count;
        my /= n_count;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            sxy += (log_n[i] - mx) * (log_t[i] - my);
            sxx += (log_n[i] - mx) * (log_n[i] - mx);
        }
        slope = sxy / sxx;
    }

    json report;
    report["config"] = config_json(c);
    report["result"] = {{"points", points}, {"log_log_slope", slope}};
    return report;
}

json run_oracle(const RunConfig& c) {
    validate_config(c);
    std::ifstream in(c.input_path);
    if (!in) throw ParseError("cannot open joint file '" + c.input_path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("joint file is not valid JSON: ") + e.what());
    }
    const DiscreteJoint joint = DiscreteJoint::from_json(doc);
    const KernelSpec kernel_y = resolve_kernel(c.kernel_y, c.bandwidth, joint.y_points());

    json result;
    result["d"] = population_d_discrete(joint, kernel_y);
    result["d_alt"] = population_d_alt_discrete(joint, kernel_y);
    result["eta"] = population_eta_discrete(joint, kernel_y);
    result["x_size"] = joint.x_size();
    result["y_size"] = joint.y_size();

    json report;
    report["config"] = config_json(c);
    report["result"] = result;
    return report;
}

json run(const RunConfig& c) {
    if (c.subcommand == "estimate") return run_estimate(c);
    if (c.subcommand == "test") return run_test(c);
    if (c.subcommand == "power") return run_power(c);
    if (c.subcommand == "bench") return run_bench(c);
    if (c.subcommand == "oracle") return run_oracle(c);
    throw InvalidConfig("unknown subcommand '" + c.subcommand + "'");
}

std::string power_report_csv(const json& report) {
    std::ostringstream out;
    out << "lambda,statistic,power,se\n";
    for (const auto& p : report.at("result").at("points")) {
        out << json(p.at("lambda")).dump() << "," << p.at("statistic").get<std::string>() << ","
            << json(p.at("power")).dump() << "," << json(p.at("standard_error")).dump() << "\n";
    }
    return out.str();
}

std::string render_report(const RunConfig& config, const json& report) {
    if (config.format == "csv") return power_report_csv(report);
    return report.dump(2) + "\n";
}

}  // namespace kir
