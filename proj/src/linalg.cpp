#include "kir/linalg.hpp"

#include <Eigen/Cholesky>
#include <sstream>

#include "kir/errors.hpp"

namespace kir {

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
        throw DimensionMismatch("symmetric matrix must be square");
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
        std::ostringstream os;
        os << "matrix is not symmetric: max |A - A^T| = " << asym;
        throw DimensionMismatch(os.str());
    }
}

SymmetricMatrix center_gram(const SymmetricMatrix& k) {
    const Eigen::MatrixXd& a = k.dense();
    const Eigen::VectorXd row_mean = a.rowwise().mean();
    const double grand_mean = row_mean.mean();
    Eigen::MatrixXd out = a;
    out.colwise() -= row_mean;
    out.rowwise() -= row_mean.transpose();
    out.array() += grand_mean;
    // Roundoff can leave a tiny asymmetry; fold it back before wrapping.
    out = 0.5 * (out + out.transpose()).eval();
    return SymmetricMatrix(std::move(out));
}

SymmetricMatrix hadamard(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.order() != b.order())
        throw DimensionMismatch("Hadamard product requires equal orders");
    return SymmetricMatrix(a.dense().cwiseProduct(b.dense()));
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_shifted(const SymmetricMatrix& k, double ridge) {
    if (!(ridge > 0.0))
        throw NotPositiveDefinite("ridge must be strictly positive");
    const Eigen::Index n = k.order();
    Eigen::MatrixXd shifted = k.dense();
    shifted.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) return llt;
    // One jitter retry, then fail loudly.
    const double jitter = 1e-10 * shifted.trace() / static_cast<double>(n);
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt;
    throw NotPositiveDefinite("Cholesky factorization failed after jitter retry");
}

}  // namespace

Eigen::MatrixXd ridge_solve(const SymmetricMatrix& k, double ridge, const Eigen::MatrixXd& rhs) {
    if (rhs.rows() != k.order())
        throw DimensionMismatch("right-hand side rows do not match matrix order");
    return factor_shifted(k, ridge).solve(rhs);
}

Eigen::VectorXd ridge_solve(const SymmetricMatrix& k, double ridge, const Eigen::VectorXd& rhs) {
    if (rhs.size() != k.order())
        throw DimensionMismatch("right-hand side size does not match matrix order");
    return factor_shifted(k, ridge).solve(rhs);
}

}  // namespace kir
