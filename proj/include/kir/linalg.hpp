#pragma once

#include <Eigen/Dense>

namespace kir {

// Dense symmetric matrix. Construction enforces max |A_ij - A_ji| <= 1e-12.
class SymmetricMatrix {
public:
    static constexpr double kSymmetryTol = 1e-12;

    explicit SymmetricMatrix(Eigen::MatrixXd m);

    Eigen::Index order() const noexcept { return m_.rows(); }
    const Eigen::MatrixXd& dense() const noexcept { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
    Eigen::MatrixXd m_;
};

// H K H with H = I - (1/n) 1 1^T. Row and column sums of the result are
// zero up to roundoff.
SymmetricMatrix center_gram(const SymmetricMatrix& k);

// Entrywise product.
SymmetricMatrix hadamard(const SymmetricMatrix& a, const SymmetricMatrix& b);

// Solves (K + ridge I) X = rhs through a Cholesky factorization; the ridge
// shift makes the system SPD for PSD K. On factorization failure retries
// once with 1e-10 * trace/n added to the diagonal, then throws
// NotPositiveDefinite.
Eigen::MatrixXd ridge_solve(const SymmetricMatrix& k, double ridge, const Eigen::MatrixXd& rhs);
Eigen::VectorXd ridge_solve(const SymmetricMatrix& k, double ridge, const Eigen::VectorXd& rhs);

}  // namespace kir
