#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drsim/design.hpp"
#include "drsim/linear.hpp"
#include "drsim/logistic.hpp"

namespace drsim {

enum class Method { OutcomeRegression, IpwHt, IpwHajek, DoublyRobust, OverlapWeight };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::OutcomeRegression: return "om";
        case Method::IpwHt: return "ipw_ht";
        case Method::IpwHajek: return "ipw_hajek";
        case Method::DoublyRobust: return "dr";
        case Method::OverlapWeight: return "ow";
    }
    return "?";
}

struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_propensity_open(const Eigen::VectorXd& e_hat) {
    for (Eigen::Index i = 0; i < e_hat.size(); ++i)
        if (e_hat(i) <= 0.0 || e_hat(i) >= 1.0)
            throw EstimationError("propensity at boundary for unit " + std::to_string(i) +
                                  " (e_hat=" + std::to_string(e_hat(i)) + ")");
}

} // namespace detail

// Mean model-predicted effect over all units.
inline double estimate_om(const OutcomeFit& fit) {
    return (fit.mu1_hat - fit.mu0_hat).mean();
}

// Horvitz-Thompson form: weighted sums divided by N, not by the weight totals.
inline double estimate_ipw_ht(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& e_hat) {
    detail::check_propensity_open(e_hat);
    const double n = static_cast<double>(z.size());
    double sum1 = 0.0, sum0 = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        sum1 += z(i) * y(i) / e_hat(i);
        sum0 += (1.0 - z(i)) * y(i) / (1.0 - e_hat(i));
    }
    return sum1 / n - sum0 / n;
}

// Hajek form: each arm's weights are normalized to sum to one.
inline double estimate_ipw_hajek(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& e_hat) {
    detail::check_propensity_open(e_hat);
    double num1 = 0.0, den1 = 0.0, num0 = 0.0, den0 = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double w1 = z(i) / e_hat(i);
        const double w0 = (1.0 - z(i)) / (1.0 - e_hat(i));
        num1 += w1 * y(i);
        den1 += w1;
        num0 += w0 * y(i);
        den0 += w0;
    }
    if (den1 == 0.0 || den0 == 0.0) throw EstimationError("ipw_hajek: empty arm");
    return num1 / den1 - num0 / den0;
}

// Augmented IPW, the doubly-robust form: outcome-model prediction plus the
// inverse-probability-weighted residual of the observed arm.
inline double estimate_dr(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& e_hat, const Eigen::VectorXd& mu0_hat,
                          const Eigen::VectorXd& mu1_hat) {
    detail::check_propensity_open(e_hat);
    const double n = static_cast<double>(z.size());
    double sum1 = 0.0, sum0 = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        sum1 += mu1_hat(i) + z(i) * (y(i) - mu1_hat(i)) / e_hat(i);
        sum0 += mu0_hat(i) + (1.0 - z(i)) * (y(i) - mu0_hat(i)) / (1.0 - e_hat(i));
    }
    return sum1 / n - sum0 / n;
}

// Overlap weighting: treated weighted by 1-e, controls by e. With a logistic
// MLE propensity these weights balance every design column exactly.
inline double estimate_ow(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& e_hat) {
    double num1 = 0.0, den1 = 0.0, num0 = 0.0, den0 = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double w1 = z(i) * (1.0 - e_hat(i));
        const double w0 = (1.0 - z(i)) * e_hat(i);
        num1 += w1 * y(i);
        den1 += w1;
        num0 += w0 * y(i);
        den0 += w0;
    }
    if (den1 == 0.0 || den0 == 0.0) throw EstimationError("ow: zero weight total in one arm");
    return num1 / den1 - num0 / den0;
}

// Indices kept at trimming level delta; the boundary is inclusive.
inline std::vector<Eigen::Index> apply_trim(const Eigen::VectorXd& e_hat, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("apply_trim: delta in (0,0.5)");
    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<std::size_t>(e_hat.size()));
    for (Eigen::Index i = 0; i < e_hat.size(); ++i)
        if (e_hat(i) >= delta && e_hat(i) <= 1.0 - delta) keep.push_back(i);
    return keep;
}

enum class CellStatus { Ok, EmptyArm, EmptyTrimSet, PropensityAtBoundary, RankDeficient, FitError };

inline const char* to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::EmptyArm: return "empty_arm";
        case CellStatus::EmptyTrimSet: return "empty_trim_set";
        case CellStatus::PropensityAtBoundary: return "propensity_at_boundary";
        case CellStatus::RankDeficient: return "rank_deficient";
        case CellStatus::FitError: return "fit_error";
    }
    return "?";
}

struct EstimateCell {
    Method method{};
    std::optional<double> trim_delta; // nullopt = no trimming
    double value = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index n_used = 0;
    CellStatus status = CellStatus::Ok;

    bool ok() const { return status == CellStatus::Ok; }
};

struct EstimatorGrid {
    std::vector<Method> methods{Method::OutcomeRegression, Method::IpwHt, Method::IpwHajek,
                                Method::DoublyRobust, Method::OverlapWeight};
    std::vector<double> trim_deltas{}; // applied to IPW and DR only
    bool refit_after_trim = true;
    OutcomeModelType outcome_model = OutcomeModelType::JointAdditive;
};

struct EstimateSet {
    std::vector<EstimateCell> cells;

    const EstimateCell* find(Method m, std::optional<double> trim = std::nullopt) const {
        for (const auto& c : cells)
            if (c.method == m && c.trim_delta == trim) return &c;
        return nullptr;
    }
    double value(Method m, std::optional<double> trim = std::nullopt) const {
        const EstimateCell* c = find(m, trim);
        if (!c || !c->ok()) throw EstimationError(std::string("no estimate for ") + to_string(m));
        return c->value;
    }
};

// One full evaluation on a sample: the untrimmed fits (reused by the
// finite-sample diagnostics) plus every requested estimator cell.
struct EstimateRun {
    EstimateSet set;
    bool fits_ok = false; // untrimmed fits succeeded
    LogisticFit ps_fit;
    OutcomeFit outcome_fit;
};

namespace detail {

inline bool trims_apply(Method m) {
    return m == Method::IpwHt || m == Method::IpwHajek || m == Method::DoublyRobust;
}

inline double evaluate_method(Method m, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                              const LogisticFit& ps, const OutcomeFit& out) {
    switch (m) {
        case Method::OutcomeRegression: return estimate_om(out);
        case Method::IpwHt: return estimate_ipw_ht(z, y, ps.e_hat);
        case Method::IpwHajek: return estimate_ipw_hajek(z, y, ps.e_hat);
        case Method::DoublyRobust: return estimate_dr(z, y, ps.e_hat, out.mu0_hat, out.mu1_hat);
        case Method::OverlapWeight: return estimate_ow(z, y, ps.e_hat);
    }
    throw EstimationError("unknown method");
}

inline CellStatus classify_failure(const std::exception& e) {
    const std::string msg = e.what();
    if (msg.find("boundary") != std::string::npos) return CellStatus::PropensityAtBoundary;
    if (msg.find("rank deficient") != std::string::npos) return CellStatus::RankDeficient;
    if (msg.find("empty arm") != std::string::npos || msg.find("both treatment levels") != std::string::npos ||
        msg.find("zero weight") != std::string::npos || msg.find("both arms") != std::string::npos)
        return CellStatus::EmptyArm;
    return CellStatus::FitError;
}

} // namespace detail

// Fits once per (design pair, trim level) and evaluates every configured
// estimator. Failures are isolated per cell with a reason code; one blown-up
// cell never discards the rest of the replicate.
inline EstimateRun estimate_all(const Eigen::MatrixXd& ps_design,
                                const Eigen::MatrixXd& outcome_design, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& y, const EstimatorGrid& grid) {
    EstimateRun run;
    run.ps_fit = fit_logistic(ps_design, z);
    run.outcome_fit = fit_outcome(outcome_design, z, y, grid.outcome_model);
    const Eigen::Index n = z.size();

    for (Method m : grid.methods) {
        EstimateCell cell;
        cell.method = m;
        cell.n_used = n;
        try {
            cell.value = detail::evaluate_method(m, z, y, run.ps_fit, run.outcome_fit);
        } catch (const std::exception& e) {
            cell.status = detail::classify_failure(e);
        }
        run.set.cells.push_back(cell);
    }

    for (double delta : grid.trim_deltas) {
        std::vector<Eigen::Index> keep = apply_trim(run.ps_fit.e_hat, delta);
        const auto m_kept = static_cast<Eigen::Index>(keep.size());

        CellStatus subset_status = CellStatus::Ok;
        Eigen::MatrixXd psd, outd;
        Eigen::VectorXd zs, ys;
        LogisticFit ps_sub;
        OutcomeFit out_sub;
        if (m_kept == 0) {
            subset_status = CellStatus::EmptyTrimSet;
        } else {
            psd.resize(m_kept, ps_design.cols());
            outd.resize(m_kept, outcome_design.cols());
            zs.resize(m_kept);
            ys.resize(m_kept);
            for (Eigen::Index r = 0; r < m_kept; ++r) {
                psd.row(r) = ps_design.row(keep[static_cast<std::size_t>(r)]);
                outd.row(r) = outcome_design.row(keep[static_cast<std::size_t>(r)]);
                zs(r) = z(keep[static_cast<std::size_t>(r)]);
                ys(r) = y(keep[static_cast<std::size_t>(r)]);
            }
            const double zsum = zs.sum();
            if (zsum == 0.0 || zsum == static_cast<double>(m_kept)) {
                subset_status = CellStatus::EmptyArm;
            } else if (grid.refit_after_trim) {
                try {
                    ps_sub = fit_logistic(psd, zs);
                    out_sub = fit_outcome(outd, zs, ys, grid.outcome_model);
                } catch (const std::exception& e) {
                    subset_status = detail::classify_failure(e);
                }
            } else {
                ps_sub = run.ps_fit;
                ps_sub.e_hat.resize(m_kept);
                out_sub = run.outcome_fit;
                out_sub.mu0_hat.resize(m_kept);
                out_sub.mu1_hat.resize(m_kept);
                for (Eigen::Index r = 0; r < m_kept; ++r) {
                    const Eigen::Index src = keep[static_cast<std::size_t>(r)];
                    ps_sub.e_hat(r) = run.ps_fit.e_hat(src);
                    out_sub.mu0_hat(r) = run.outcome_fit.mu0_hat(src);
                    out_sub.mu1_hat(r) = run.outcome_fit.mu1_hat(src);
                }
            }
        }

        for (Method m : grid.methods) {
            if (!detail::trims_apply(m)) continue; // trimming targets the weighting estimators
            EstimateCell cell;
            cell.method = m;
            cell.trim_delta = delta;
            cell.n_used = m_kept;
            if (subset_status != CellStatus::Ok) {
                cell.status = subset_status;
            } else {
                try {
                    cell.value = detail::evaluate_method(m, zs, ys, ps_sub, out_sub);
                } catch (const std::exception& e) {
                    cell.status = detail::classify_failure(e);
                }
            }
            run.set.cells.push_back(cell);
        }
    }
    return run;
}

// Convenience overload for the simulation path: derives both designs from the
// raw covariates under the given misspecification.
inline EstimateRun estimate_all(const Eigen::MatrixXd& x, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& y, const ModelSpec& spec,
                                const EstimatorGrid& grid) {
    return estimate_all(build_design(x, spec.ps_form), build_design(x, spec.outcome_form), z, y,
                        grid);
}

} // namespace drsim
