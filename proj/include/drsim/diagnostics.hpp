#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "drsim/dataset.hpp"
#include "drsim/datagen.hpp"
#include "drsim/estimators.hpp"

namespace drsim {

// Per-unit residuals of the two working models. Their mean product equals
// the gap between the doubly-robust estimate and the sample average effect,
// an exact algebraic identity that the test suite pins at 1e-10.
struct ResidualSet {
    Eigen::VectorXd ps_residual;      // z - e_hat
    Eigen::VectorXd outcome_residual; // (y1-mu1)/e_hat + (y0-mu0)/(1-e_hat)

    Eigen::VectorXd product() const {
        return ps_residual.cwiseProduct(outcome_residual);
    }
};

// Sample average treatment effect over the tracked potential outcomes.
inline double sate(const SimDataset& ds) { return (ds.y1 - ds.y0).mean(); }

struct FiniteSampleError {
    double delta = 0.0; // mean of the residual products
    ResidualSet residuals;
};

inline FiniteSampleError finite_sample_error(const SimDataset& ds, const Eigen::VectorXd& e_hat,
                                             const Eigen::VectorXd& mu0_hat,
                                             const Eigen::VectorXd& mu1_hat) {
    detail::check_propensity_open(e_hat);
    const Eigen::Index n = ds.n();
    FiniteSampleError out;
    out.residuals.ps_residual.resize(n);
    out.residuals.outcome_residual.resize(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = ds.z(i) - e_hat(i);
        const double ry = (ds.y1(i) - mu1_hat(i)) / e_hat(i) +
                          (ds.y0(i) - mu0_hat(i)) / (1.0 - e_hat(i));
        out.residuals.ps_residual(i) = re;
        out.residuals.outcome_residual(i) = ry;
        sum += re * ry;
    }
    out.delta = sum / static_cast<double>(n);
    return out;
}

enum class Subpopulation { Overall, Tail, Bulk };

inline const char* to_string(Subpopulation p) {
    switch (p) {
        case Subpopulation::Overall: return "overall";
        case Subpopulation::Tail: return "tail";
        case Subpopulation::Bulk: return "bulk";
    }
    return "?";
}

// Tail/bulk membership can be read off the within-replicate percentiles of
// the fitted propensity (the default) or off the raw 0.05/0.95 values.
enum class TailMode { Percentile, RawThreshold };

namespace detail {

// Type-7 quantile (linear interpolation between order statistics).
inline double quantile_type7(std::vector<double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("quantile of empty sample");
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace detail

// Boolean membership mask for a subpopulation; boundary units fall on the
// inner side (not tail, inside bulk).
inline std::vector<bool> subpop_members(const Eigen::VectorXd& e_hat, Subpopulation pop,
                                        TailMode mode = TailMode::Percentile) {
    const Eigen::Index n = e_hat.size();
    std::vector<bool> in(static_cast<std::size_t>(n), true);
    if (pop == Subpopulation::Overall) return in;

    double lo, hi;
    if (mode == TailMode::Percentile) {
        std::vector<double> sorted(e_hat.data(), e_hat.data() + n);
        std::sort(sorted.begin(), sorted.end());
        if (pop == Subpopulation::Tail) {
            lo = detail::quantile_type7(sorted, 0.05);
            hi = detail::quantile_type7(sorted, 0.95);
        } else {
            lo = detail::quantile_type7(sorted, 0.25);
            hi = detail::quantile_type7(sorted, 0.75);
        }
    } else {
        if (pop == Subpopulation::Tail) {
            lo = 0.05;
            hi = 0.95;
        } else {
            lo = 0.25;
            hi = 0.75;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool inside = e_hat(i) >= lo && e_hat(i) <= hi;
        in[static_cast<std::size_t>(i)] = (pop == Subpopulation::Tail) ? !inside : inside;
    }
    return in;
}

// Within-replicate mean of the residual product over one subpopulation;
// empty membership yields no value.
inline std::optional<double> subpop_error(const ResidualSet& residuals,
                                          const Eigen::VectorXd& e_hat, Subpopulation pop,
                                          TailMode mode = TailMode::Percentile) {
    const std::vector<bool> in = subpop_members(e_hat, pop, mode);
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < e_hat.size(); ++i) {
        if (!in[static_cast<std::size_t>(i)]) continue;
        sum += residuals.ps_residual(i) * residuals.outcome_residual(i);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

inline constexpr int kNumIntervals = 100;

// Index of the length-0.01 half-open interval (lo, hi] containing a
// propensity in (0,1).
inline int interval_index(double e) {
    const int idx = static_cast<int>(std::ceil(e * kNumIntervals)) - 1;
    return std::clamp(idx, 0, kNumIntervals - 1);
}

enum class ResidualQuantity { PsResidual, OutcomeResidual, Product };

inline const char* to_string(ResidualQuantity q) {
    switch (q) {
        case ResidualQuantity::PsResidual: return "r_e";
        case ResidualQuantity::OutcomeResidual: return "r_y";
        case ResidualQuantity::Product: return "r_e_r_y";
    }
    return "?";
}

// Within-replicate average of the chosen residual quantity over units whose
// true propensity falls in each interval. Intervals with no units are left
// empty and are skipped by the cross-replicate aggregation.
inline std::array<std::optional<double>, kNumIntervals>
interval_means(const ResidualSet& residuals, const Eigen::VectorXd& e_true,
               ResidualQuantity quantity) {
    std::array<double, kNumIntervals> sum{};
    std::array<Eigen::Index, kNumIntervals> count{};
    for (Eigen::Index i = 0; i < e_true.size(); ++i) {
        const int l = interval_index(e_true(i));
        double v = 0.0;
        switch (quantity) {
            case ResidualQuantity::PsResidual: v = residuals.ps_residual(i); break;
            case ResidualQuantity::OutcomeResidual: v = residuals.outcome_residual(i); break;
            case ResidualQuantity::Product:
                v = residuals.ps_residual(i) * residuals.outcome_residual(i);
                break;
        }
        sum[static_cast<std::size_t>(l)] += v;
        ++count[static_cast<std::size_t>(l)];
    }
    std::array<std::optional<double>, kNumIntervals> out;
    for (int l = 0; l < kNumIntervals; ++l)
        if (count[static_cast<std::size_t>(l)] > 0)
            out[static_cast<std::size_t>(l)] =
                sum[static_cast<std::size_t>(l)] / static_cast<double>(count[static_cast<std::size_t>(l)]);
    return out;
}

// Accumulates mean absolute value across replicates, per interval, ignoring
// replicates that contribute nothing to an interval.
class IntervalMavAccumulator {
public:
    void add(const std::array<std::optional<double>, kNumIntervals>& means) {
        for (int l = 0; l < kNumIntervals; ++l) {
            const auto idx = static_cast<std::size_t>(l);
            if (means[idx]) {
                abs_sum_[idx] += std::abs(*means[idx]);
                ++count_[idx];
            }
        }
    }

    std::optional<double> mav(int interval) const {
        const auto idx = static_cast<std::size_t>(interval);
        if (count_[idx] == 0) return std::nullopt;
        return abs_sum_[idx] / static_cast<double>(count_[idx]);
    }

    long replicates_with_data(int interval) const {
        return count_[static_cast<std::size_t>(interval)];
    }

private:
    std::array<double, kNumIntervals> abs_sum_{};
    std::array<long, kNumIntervals> count_{};
};

// Probability mass of the true propensity per interval, estimated from one
// large draw, plus the by-treatment-arm histograms.
struct PhiMass {
    std::array<double, kNumIntervals> mass{};
    std::array<double, kNumIntervals> mass_treated{};
    std::array<double, kNumIntervals> mass_control{};
    double tail_proportion = 0.0; // fraction with e outside (0.05, 0.95)
    Eigen::Index n = 0;
    Eigen::Index n_treated = 0;
};

inline PhiMass phi_mass(const Scenario& sc, RngStream& rng, Eigen::Index n = 100'000) {
    PhiMass out;
    out.n = n;
    const Eigen::MatrixXd x = gen_covariates(n, rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::array<Eigen::Index, kNumIntervals> all{}, treated{}, control{};
    Eigen::Index n_tail = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double e = true_propensity(x.row(i), sc);
        const auto l = static_cast<std::size_t>(interval_index(e));
        ++all[l];
        if (unif(rng) < e) {
            ++treated[l];
            ++out.n_treated;
        } else {
            ++control[l];
        }
        if (e <= 0.05 || e >= 0.95) ++n_tail;
    }
    const auto n_control = n - out.n_treated;
    for (int l = 0; l < kNumIntervals; ++l) {
        const auto idx = static_cast<std::size_t>(l);
        out.mass[idx] = static_cast<double>(all[idx]) / static_cast<double>(n);
        out.mass_treated[idx] =
            out.n_treated > 0 ? static_cast<double>(treated[idx]) / static_cast<double>(out.n_treated) : 0.0;
        out.mass_control[idx] =
            n_control > 0 ? static_cast<double>(control[idx]) / static_cast<double>(n_control) : 0.0;
    }
    out.tail_proportion = static_cast<double>(n_tail) / static_cast<double>(n);
    return out;
}

} // namespace drsim
