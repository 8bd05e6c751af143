#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace drsim {

// Working-model covariate transforms. WrongForm swaps the third covariate for
// its square; OmitVars drops the third and fourth covariates entirely.
enum class CovariateForm { Correct, WrongForm, OmitVars };

struct ModelSpec {
    CovariateForm ps_form = CovariateForm::Correct;
    CovariateForm outcome_form = CovariateForm::Correct;
};

inline const char* to_string(CovariateForm f) {
    switch (f) {
        case CovariateForm::Correct: return "correct";
        case CovariateForm::WrongForm: return "wrong_form";
        case CovariateForm::OmitVars: return "omit_vars";
    }
    return "?";
}

inline std::string spec_label(const ModelSpec& spec) {
    const bool ps_ok = spec.ps_form == CovariateForm::Correct;
    const bool out_ok = spec.outcome_form == CovariateForm::Correct;
    if (ps_ok && out_ok) return "correct";
    if (!ps_ok && out_ok) return std::string("ps_") + to_string(spec.ps_form);
    if (ps_ok && !out_ok) return std::string("outcome_") + to_string(spec.outcome_form);
    return std::string("both_") + to_string(spec.outcome_form);
}

// Design matrix with a leading intercept column.
inline Eigen::MatrixXd build_design(const Eigen::MatrixXd& x, CovariateForm form) {
    const Eigen::Index n = x.rows();
    if (x.cols() != 6) throw std::invalid_argument("build_design: expected 6 covariates");
    const Eigen::Index p = form == CovariateForm::OmitVars ? 5 : 7;
    if (n < p) throw std::invalid_argument("build_design: fewer rows than design columns");
    Eigen::MatrixXd d(n, p);
    d.col(0).setOnes();
    switch (form) {
        case CovariateForm::Correct:
            d.rightCols(6) = x;
            break;
        case CovariateForm::WrongForm:
            d.rightCols(6) = x;
            d.col(3) = x.col(2).array().square();
            break;
        case CovariateForm::OmitVars:
            d.col(1) = x.col(0);
            d.col(2) = x.col(1);
            d.col(3) = x.col(4);
            d.col(4) = x.col(5);
            break;
    }
    return d;
}

} // namespace drsim
