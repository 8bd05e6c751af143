#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace drsim {

// Parameters of the simulated data-generating process: a logistic treatment
// model over six covariates and a linear outcome model with a homogeneous
// additive treatment effect.
struct Scenario {
    double prevalence_target = 0.4; // target fraction treated
    double overlap_d = 1.0;         // slope multiplier; larger = poorer overlap
    double ps_intercept = 0.0;      // log-odds intercept of the treatment model
    std::array<double, 6> ps_slopes{};
    double outcome_intercept = 0.0;
    std::array<double, 6> outcome_slopes{};
    double treatment_effect = 1.0;
    double noise_sd = 1.0;
    std::string label;
};

namespace preset {

inline constexpr std::array<double, 6> kPsSlopeBase = {0.2, 0.3, 0.4, -0.25, -0.3, -0.3};
inline constexpr std::array<double, 6> kOutcomeSlopes = {-0.5, -0.8, -1.2, 0.8, 0.8, 1.0};

// Intercepts calibrated so that E[e(X)] hits the target prevalence for each
// (prevalence, d) pair; calibrate_intercept() reproduces them as a cross-check.
inline double ps_intercept_for(double prevalence, double d) {
    if (prevalence == 0.4 && d == 1.0) return -0.05;
    if (prevalence == 0.4 && d == 3.0) return 0.37;
    if (prevalence == 0.1 && d == 1.0) return -2.13;
    if (prevalence == 0.1 && d == 3.0) return -3.16;
    throw std::invalid_argument("no preset intercept for prevalence=" +
                                std::to_string(prevalence) + ", d=" + std::to_string(d));
}

} // namespace preset

inline std::array<double, 6> scaled_ps_slopes(double d) {
    std::array<double, 6> s{};
    for (int j = 0; j < 6; ++j) s[j] = d * preset::kPsSlopeBase[j];
    return s;
}

// The four study scenarios: prevalence 0.4 or 0.1 crossed with good (d=1) or
// poor (d=3) overlap.
inline Scenario make_scenario(double prevalence, double d) {
    Scenario sc;
    sc.prevalence_target = prevalence;
    sc.overlap_d = d;
    sc.ps_intercept = preset::ps_intercept_for(prevalence, d);
    sc.ps_slopes = scaled_ps_slopes(d);
    sc.outcome_intercept = 0.0;
    sc.outcome_slopes = preset::kOutcomeSlopes;
    sc.treatment_effect = 1.0;
    sc.noise_sd = 1.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "prev%.2g_d%.2g", prevalence, d);
    sc.label = buf;
    return sc;
}

inline std::array<Scenario, 4> all_preset_scenarios() {
    return {make_scenario(0.4, 1.0), make_scenario(0.4, 3.0),
            make_scenario(0.1, 1.0), make_scenario(0.1, 3.0)};
}

} // namespace drsim
