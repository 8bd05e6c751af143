#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "drsim/dataset.hpp"
#include "drsim/rng.hpp"
#include "drsim/scenario.hpp"

namespace drsim {

struct EmptyArmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerically safe logistic; never returns an exact 0 or 1 for finite input
// below the exp underflow threshold.
inline double logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Latent covariates are equicorrelated Gaussians (unit variance, pairwise
// correlation 0.5), sampled as sqrt(.5)*shared + sqrt(.5)*own, which realizes
// the 0.5*J + 0.5*I covariance without a matrix factorization. The last three
// latents are dichotomized at zero.
inline Eigen::MatrixXd gen_covariates(Eigen::Index n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("gen_covariates: n must be >= 1");
    Eigen::MatrixXd x(n, 6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double w = std::sqrt(0.5);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double shared = gauss(rng);
        for (int j = 0; j < 6; ++j) {
            const double v = w * (shared + gauss(rng));
            x(i, j) = (j < 3) ? v : (v < 0.0 ? 1.0 : 0.0);
        }
    }
    return x;
}

inline double true_propensity(const Eigen::RowVectorXd& x_row, const Scenario& sc) {
    double t = sc.ps_intercept;
    for (int j = 0; j < 6; ++j) t += sc.ps_slopes[j] * x_row(j);
    return logistic(t);
}

inline Eigen::VectorXd true_propensity(const Eigen::MatrixXd& x, const Scenario& sc) {
    Eigen::VectorXd e(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) e(i) = true_propensity(x.row(i), sc);
    return e;
}

// Draws a full sample: covariates, Bernoulli treatment from the true
// propensity, and both potential outcomes built from one shared noise draw
// per unit, so y1 - y0 == treatment_effect exactly.
inline SimDataset make_dataset(const Scenario& sc, Eigen::Index n, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("make_dataset: n must be >= 2");
    SimDataset ds;
    ds.x = gen_covariates(n, rng);
    ds.e_true = true_propensity(ds.x, sc);
    ds.z.resize(n);
    ds.y0.resize(n);
    ds.y1.resize(n);
    ds.y_obs.resize(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        ds.z(i) = unif(rng) < ds.e_true(i) ? 1.0 : 0.0;
        double mean0 = sc.outcome_intercept;
        for (int j = 0; j < 6; ++j) mean0 += sc.outcome_slopes[j] * ds.x(i, j);
        const double noise = sc.noise_sd * gauss(rng);
        ds.y0(i) = mean0 + noise;
        ds.y1(i) = ds.y0(i) + sc.treatment_effect;
        ds.y_obs(i) = ds.z(i) == 1.0 ? ds.y1(i) : ds.y0(i);
    }
    const auto nt = ds.n_treated();
    if (nt == 0) throw EmptyArmError("make_dataset: no treated units drawn");
    if (nt == n) throw EmptyArmError("make_dataset: no control units drawn");
    return ds;
}

struct RedrawResult {
    SimDataset dataset;
    int attempts = 1; // 1 means the first draw already had both arms
};

// Samples with an empty arm are redrawn from the same stream; the attempt
// count is surfaced so harnesses can report the exclusion rate.
inline RedrawResult make_dataset_redraw(const Scenario& sc, Eigen::Index n, RngStream& rng,
                                        int max_attempts = 1000) {
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        try {
            return {make_dataset(sc, n, rng), attempt};
        } catch (const EmptyArmError&) {
            // redraw
        }
    }
    throw EmptyArmError("make_dataset_redraw: no dataset with both arms after " +
                        std::to_string(max_attempts) + " attempts");
}

// Solves E[logistic(a0 + slopes.X)] = prevalence_target for a0 by bisection
// over one fixed covariate draw. The expectation is monotone increasing in
// a0, so the bracket below always contains the root.
inline double calibrate_intercept(double prevalence_target, const std::array<double, 6>& ps_slopes,
                                  RngStream& rng, Eigen::Index n_draws = 1'000'000) {
    if (!(prevalence_target > 0.0 && prevalence_target < 1.0))
        throw std::invalid_argument("calibrate_intercept: prevalence_target must be in (0,1)");
    const Eigen::MatrixXd x = gen_covariates(n_draws, rng);
    Eigen::VectorXd lin(n_draws);
    for (Eigen::Index i = 0; i < n_draws; ++i) {
        double t = 0.0;
        for (int j = 0; j < 6; ++j) t += ps_slopes[j] * x(i, j);
        lin(i) = t;
    }
    auto mean_ps = [&](double a0) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n_draws; ++i) s += logistic(a0 + lin(i));
        return s / static_cast<double>(n_draws);
    };
    double lo = -40.0, hi = 40.0;
    if (mean_ps(lo) > prevalence_target || mean_ps(hi) < prevalence_target)
        throw std::runtime_error("calibrate_intercept: target outside bracket");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (mean_ps(mid) < prevalence_target ? lo : hi) = mid;
        if (hi - lo < 1e-4) return 0.5 * (lo + hi);
    }
    throw std::runtime_error("calibrate_intercept: bisection failed to converge");
}

} // namespace drsim
