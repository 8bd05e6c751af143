#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace drsim {

// Whether the outcome regression is one joint fit with an additive treatment
// column (the default; the treatment coefficient is then the model's effect
// estimate) or two separate per-arm fits on the same covariate design.
enum class OutcomeModelType { JointAdditive, PerArm };

struct OutcomeFit {
    Eigen::VectorXd coef;     // joint: [design coef..., treatment]; per-arm: control fit then treated fit
    Eigen::VectorXd mu0_hat;  // predicted outcome with treatment forced to 0
    Eigen::VectorXd mu1_hat;  // predicted outcome with treatment forced to 1
    OutcomeModelType type = OutcomeModelType::JointAdditive;
};

struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Least squares via column-pivoted QR; flags the first column the pivoting
// pushed past the numerical rank when the problem is deficient.
inline Eigen::VectorXd qr_solve_full_rank(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                          const char* what) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols()) {
        const auto perm = qr.colsPermutation().indices();
        const Eigen::Index bad = perm(qr.rank());
        throw RankDeficiencyError(std::string(what) + ": design is rank deficient (column " +
                                  std::to_string(bad) + " is collinear with earlier columns)");
    }
    return qr.solve(b);
}

} // namespace detail

inline OutcomeFit fit_outcome(const Eigen::MatrixXd& design, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& y,
                              OutcomeModelType type = OutcomeModelType::JointAdditive) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    if (z.size() != n || y.size() != n) throw std::invalid_argument("fit_outcome: size mismatch");

    OutcomeFit fit;
    fit.type = type;
    if (type == OutcomeModelType::JointAdditive) {
        Eigen::MatrixXd full(n, p + 1);
        full.leftCols(p) = design;
        full.col(p) = z;
        fit.coef = detail::qr_solve_full_rank(full, y, "fit_outcome");
        const Eigen::VectorXd base = design * fit.coef.head(p);
        fit.mu0_hat = base;
        fit.mu1_hat = base.array() + fit.coef(p);
    } else {
        const Eigen::Index n1 = static_cast<Eigen::Index>(z.sum());
        const Eigen::Index n0 = n - n1;
        if (n0 == 0 || n1 == 0)
            throw std::invalid_argument("fit_outcome: per-arm fit needs both arms");
        Eigen::MatrixXd d0(n0, p), d1(n1, p);
        Eigen::VectorXd y0(n0), y1(n1);
        Eigen::Index i0 = 0, i1 = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (z(i) == 1.0) {
                d1.row(i1) = design.row(i);
                y1(i1++) = y(i);
            } else {
                d0.row(i0) = design.row(i);
                y0(i0++) = y(i);
            }
        }
        const Eigen::VectorXd c0 = detail::qr_solve_full_rank(d0, y0, "fit_outcome control arm");
        const Eigen::VectorXd c1 = detail::qr_solve_full_rank(d1, y1, "fit_outcome treated arm");
        fit.coef.resize(2 * p);
        fit.coef << c0, c1;
        fit.mu0_hat = design * c0;
        fit.mu1_hat = design * c1;
    }
    return fit;
}

} // namespace drsim
