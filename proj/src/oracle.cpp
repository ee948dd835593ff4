#include "kir/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kir/errors.hpp"
#include "kir/rng.hpp"

namespace kir {

DiscreteJoint::DiscreteJoint(std::vector<std::string> x_labels, PointSet y_points,
                             Eigen::MatrixXd probs)
    : x_labels_(std::move(x_labels)), y_points_(std::move(y_points)), probs_(std::move(probs)) {
    const auto nx = static_cast<Eigen::Index>(x_labels_.size());
    const auto ny = static_cast<Eigen::Index>(y_points_.size());
    if (nx == 0 || ny == 0)
        throw DimensionMismatch("joint distribution needs non-empty alphabets");
    if (probs_.rows() != nx || probs_.cols() != ny)
        throw DimensionMismatch("probability matrix shape does not match alphabets");
    if ((probs_.array() < 0.0).any())
        throw DimensionMismatch("probabilities must be non-negative");
    if (std::abs(probs_.sum() - 1.0) > kMassTol)
        throw DimensionMismatch("probabilities must sum to 1");
    std::size_t positive_y = 0;
    for (Eigen::Index b = 0; b < ny; ++b) {
        const double mass = probs_.col(b).sum();
        if (!(mass > 0.0)) {
            std::ostringstream os;
            os << "y alphabet point " << b << " has zero marginal mass";
            throw DimensionMismatch(os.str());
        }
        ++positive_y;
    }
    if (positive_y < 2)
        throw DimensionMismatch("Y marginal must be non-degenerate");
}

DiscreteJoint DiscreteJoint::from_json(const nlohmann::json& doc) {
    if (!doc.contains("x_labels") || !doc.contains("y_points") || !doc.contains("probs"))
        throw ParseError("joint document needs x_labels, y_points, and probs");

    std::vector<std::string> labels;
    for (const auto& l : doc.at("x_labels")) {
        if (l.is_string())
            labels.push_back(l.get<std::string>());
        else
            labels.push_back(l.dump());
    }

    const auto& ypts = doc.at("y_points");
    if (ypts.empty()) throw ParseError("y_points must be non-empty");
    PointSet y = [&] {
        if (ypts.front().is_array()) {
            const std::size_t d = ypts.front().size();
            RealMatrix m(static_cast<Eigen::Index>(ypts.size()), static_cast<Eigen::Index>(d));
            Eigen::Index r = 0;
            for (const auto& p : ypts) {
                if (!p.is_array() || p.size() != d)
                    throw ParseError("y_points rows have inconsistent dimensions");
                for (std::size_t c = 0; c < d; ++c)
                    m(r, static_cast<Eigen::Index>(c)) = p.at(c).get<double>();
                ++r;
            }
            return PointSet::reals(std::move(m));
        }
        std::vector<double> vals;
        for (const auto& p : ypts) vals.push_back(p.get<double>());
        return PointSet::reals_1d(vals);
    }();

    const auto& probs = doc.at("probs");
    Eigen::MatrixXd p(static_cast<Eigen::Index>(probs.size()),
                      static_cast<Eigen::Index>(y.size()));
    Eigen::Index r = 0;
    for (const auto& row : probs) {
        if (row.size() != y.size())
            throw ParseError("probs rows must match the y alphabet size");
        for (std::size_t c = 0; c < row.size(); ++c)
            p(r, static_cast<Eigen::Index>(c)) = row.at(c).get<double>();
        ++r;
    }
    return DiscreteJoint(std::move(labels), std::move(y), std::move(p));
}

double DiscreteJoint::x_marginal(std::size_t a) const {
    return probs_.row(static_cast<Eigen::Index>(a)).sum();
}

double DiscreteJoint::y_marginal(std::size_t b) const {
    return probs_.col(static_cast<Eigen::Index>(b)).sum();
}

namespace {

// Kernel matrix on the Y alphabet: G(b, b') = k(y_b, y_b').
Eigen::MatrixXd alphabet_gram(const DiscreteJoint& joint, const KernelSpec& kernel_y) {
    return gram_matrix(kernel_y, joint.y_points()).dense();
}

double marginal_variance_at(const DiscreteJoint& joint, const Eigen::MatrixXd& gram,
                            std::size_t b) {
    const auto ny = static_cast<std::size_t>(gram.rows());
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t bp = 0; bp < ny; ++bp) {
        const double q = joint.y_marginal(bp);
        const double g = gram(static_cast<Eigen::Index>(bp), static_cast<Eigen::Index>(b));
        e1 += q * g;
        e2 += q * g * g;
    }
    return e2 - e1 * e1;
}

void require_nondegenerate(double variance, std::size_t b) {
    if (!(variance > DiscreteJoint::kMassTol)) {
        std::ostringstream os;
        os << "V_Y[k(Y,y)] is degenerate (" << variance << ") at y alphabet index " << b;
        throw DegeneratePopulationVariance(os.str());
    }
}

}  // namespace

double population_d_discrete(const DiscreteJoint& joint, const KernelSpec& kernel_y) {
    const Eigen::MatrixXd gram = alphabet_gram(joint, kernel_y);
    const std::size_t nx = joint.x_size();
    const std::size_t ny = joint.y_size();

    double integral = 0.0;
    for (std::size_t b = 0; b < ny; ++b) {
        const double var_y = marginal_variance_at(joint, gram, b);
        require_nondegenerate(var_y, b);
        double expected_cond_var = 0.0;
        for (std::size_t a = 0; a < nx; ++a) {
            const double px = joint.x_marginal(a);
            if (px == 0.0) continue;
            double c1 = 0.0, c2 = 0.0;
            for (std::size_t bp = 0; bp < ny; ++bp) {
                const double cond = joint.probs()(static_cast<Eigen::Index>(a),
                                                  static_cast<Eigen::Index>(bp)) /
                                    px;
                const double g =
                    gram(static_cast<Eigen::Index>(bp), static_cast<Eigen::Index>(b));
                c1 += cond * g;
                c2 += cond * g * g;
            }
            expected_cond_var += px * (c2 - c1 * c1);
        }
        integral += joint.y_marginal(b) * expected_cond_var / var_y;
    }
    return 1.0 - integral;
}

double population_d_alt_discrete(const DiscreteJoint& joint, const KernelSpec& kernel_y) {
    const Eigen::MatrixXd gram = alphabet_gram(joint, kernel_y);
    const std::size_t nx = joint.x_size();
    const std::size_t ny = joint.y_size();

    double integral = 0.0;
    for (std::size_t b = 0; b < ny; ++b) {
        const double var_y = marginal_variance_at(joint, gram, b);
        require_nondegenerate(var_y, b);
        // Conditional means m_a = E_{Y|X=a}[k(Y, y_b)] and their variance
        // over X.
        double mean = 0.0;
        std::vector<double> cond_means(nx, 0.0);
        for (std::size_t a = 0; a < nx; ++a) {
            const double px = joint.x_marginal(a);
            if (px == 0.0) continue;
            double c1 = 0.0;
            for (std::size_t bp = 0; bp < ny; ++bp) {
                const double cond = joint.probs()(static_cast<Eigen::Index>(a),
                                                  static_cast<Eigen::Index>(bp)) /
                                    px;
                c1 += cond * gram(static_cast<Eigen::Index>(bp), static_cast<Eigen::Index>(b));
            }
            cond_means[a] = c1;
            mean += px * c1;
        }
        double var_x = 0.0;
        for (std::size_t a = 0; a < nx; ++a) {
            const double px = joint.x_marginal(a);
            if (px == 0.0) continue;
            const double d = cond_means[a] - mean;
            var_x += px * d * d;
        }
        integral += joint.y_marginal(b) * var_x / var_y;
    }
    return integral;
}

double population_eta_discrete(const DiscreteJoint& joint, const KernelSpec& kernel_y) {
    const Eigen::MatrixXd gram = alphabet_gram(joint, kernel_y);
    const std::size_t nx = joint.x_size();
    const std::size_t ny = joint.y_size();

    // Numerator: sum_a P_X(a) * (p_a - q)^T G (p_a - q) with p_a the
    // conditional and q the marginal Y distribution.
    double numerator = 0.0;
    for (std::size_t a = 0; a < nx; ++a) {
        const double px = joint.x_marginal(a);
        if (px == 0.0) continue;
        std::vector<double> diff(ny);
        for (std::size_t b = 0; b < ny; ++b)
            diff[b] = joint.probs()(static_cast<Eigen::Index>(a),
                                    static_cast<Eigen::Index>(b)) /
                          px -
                      joint.y_marginal(b);
        double quad = 0.0;
        for (std::size_t b = 0; b < ny; ++b)
            for (std::size_t bp = 0; bp < ny; ++bp)
                quad += diff[b] * diff[bp] *
                        gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(bp));
        numerator += px * quad;
    }

    // Denominator: E_Y[k(Y, Y)] - E_{Y, Y'}[k(Y, Y')].
    double self_term = 0.0, cross_term = 0.0;
    for (std::size_t b = 0; b < ny; ++b) {
        self_term += joint.y_marginal(b) *
                     gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
        for (std::size_t bp = 0; bp < ny; ++bp)
            cross_term += joint.y_marginal(b) * joint.y_marginal(bp) *
                          gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(bp));
    }
    const double denominator = self_term - cross_term;
    if (!(denominator > DiscreteJoint::kMassTol))
        throw DegeneratePopulationVariance("global normalizer is degenerate");
    return numerator / denominator;
}

SampleSet sample_from_joint(const DiscreteJoint& joint, std::size_t n, std::uint64_t seed) {
    const std::size_t nx = joint.x_size();
    const std::size_t ny = joint.y_size();

    // Flattened cell CDF in row-major (a, b) order.
    std::vector<double> cdf;
    cdf.reserve(nx * ny);
    double acc = 0.0;
    for (std::size_t a = 0; a < nx; ++a)
        for (std::size_t b = 0; b < ny; ++b) {
            acc += joint.probs()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            cdf.push_back(acc);
        }
    cdf.back() = 1.0;

    rng::SplitMix64 gen(seed);
    std::vector<double> x_vals(n);
    std::vector<std::size_t> y_cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = gen.next_double();
        // First cell with cdf > u; zero-mass cells are never selected.
        const std::size_t cell = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        x_vals[i] = static_cast<double>(cell / ny);  // label index embeds as a real
        y_cells[i] = cell % ny;
    }

    PointSet x = PointSet::reals_1d(x_vals);
    if (joint.y_points().kind() == PointKind::Real) {
        const auto& ym = joint.y_points().real_matrix();
        RealMatrix out(static_cast<Eigen::Index>(n), ym.cols());
        for (std::size_t i = 0; i < n; ++i)
            out.row(static_cast<Eigen::Index>(i)) = ym.row(static_cast<Eigen::Index>(y_cells[i]));
        return SampleSet(std::move(x), PointSet::reals(std::move(out)));
    }
    std::vector<Rotation3> out;
    out.reserve(n);
    const auto& yr = joint.y_points().rotation_list();
    for (std::size_t i = 0; i < n; ++i) out.push_back(yr[y_cells[i]]);
    return SampleSet(std::move(x), PointSet::rotations(std::move(out)));
}

}  // namespace kir
