#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "drsim/datagen.hpp"

namespace drsim {

struct LogisticFit {
    Eigen::VectorXd coef;  // log-odds scale, intercept first
    bool converged = false;
    bool separation_suspected = false;
    int n_iter = 0;
    Eigen::VectorXd e_hat; // fitted probabilities
};

namespace detail {

inline double binomial_deviance(const Eigen::VectorXd& z, const Eigen::VectorXd& lin) {
    // -2 loglik, written with log1p(exp(.)) to stay finite for large |lin|.
    double dev = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double t = lin(i);
        const double log1pe = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        dev += 2.0 * (log1pe - z(i) * t);
    }
    return dev;
}

} // namespace detail

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares with step halving on deviance increase. Near-separated samples are
// reported (converged=false or separation_suspected=true) but a usable fit is
// still returned, since downstream estimators must run on such replicates.
inline LogisticFit fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& z,
                                int max_iter = 100, double coef_tol = 1e-8,
                                double deviance_rel_tol = 1e-10) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    if (z.size() != n) throw std::invalid_argument("fit_logistic: size mismatch");
    const double n_treated = z.sum();
    if (n_treated == 0.0 || n_treated == static_cast<double>(n))
        throw std::invalid_argument("fit_logistic: both treatment levels must be present");

    LogisticFit fit;
    fit.coef = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
    double dev = detail::binomial_deviance(z, lin);

    Eigen::VectorXd prob(n), weight(n);
    for (fit.n_iter = 1; fit.n_iter <= max_iter; ++fit.n_iter) {
        for (Eigen::Index i = 0; i < n; ++i) {
            prob(i) = logistic(lin(i));
            weight(i) = prob(i) * (1.0 - prob(i));
        }
        Eigen::MatrixXd xtwx = design.transpose() * weight.asDiagonal() * design;
        const Eigen::VectorXd score = design.transpose() * (z - prob);

        Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
        Eigen::VectorXd step;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            step = ldlt.solve(score);
        } else {
            // singular weighted cross-product: ridge this iteration only
            xtwx.diagonal().array() += 1e-10;
            step = xtwx.ldlt().solve(score);
        }

        // step halving keeps the deviance monotone when the quadratic model
        // overshoots (common near separation)
        double scale = 1.0;
        Eigen::VectorXd coef_new, lin_new;
        double dev_new = 0.0;
        for (int half = 0; half < 30; ++half) {
            coef_new = fit.coef + scale * step;
            lin_new = design * coef_new;
            dev_new = detail::binomial_deviance(z, lin_new);
            if (dev_new <= dev + 1e-12 * (1.0 + std::abs(dev))) break;
            scale *= 0.5;
        }

        const double max_change = (scale * step).cwiseAbs().maxCoeff();
        const double dev_change = std::abs(dev - dev_new);
        fit.coef = coef_new;
        lin = lin_new;
        dev = dev_new;
        if (max_change < coef_tol || dev_change < deviance_rel_tol * (1.0 + std::abs(dev))) {
            fit.converged = true;
            break;
        }
    }

    fit.e_hat.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) fit.e_hat(i) = logistic(lin(i));
    if (fit.coef.cwiseAbs().maxCoeff() > 30.0) {
        fit.separation_suspected = true;
        fit.converged = false;
    }
    return fit;
}

} // namespace drsim
