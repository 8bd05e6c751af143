#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "drsim/csv.hpp"

namespace drsim {

// One simulated sample. Both potential outcomes and the true propensity are
// kept alongside the observables so finite-sample quantities (SATE, residual
// products) can be computed exactly.
struct SimDataset {
    Eigen::MatrixXd x;      // n x 6; columns 1-3 continuous, 4-6 binary
    Eigen::VectorXd z;      // treatment indicator, 0/1
    Eigen::VectorXd y_obs;  // observed outcome
    Eigen::VectorXd y0;     // potential outcome under control
    Eigen::VectorXd y1;     // potential outcome under treatment
    Eigen::VectorXd e_true; // true propensity score, in (0,1)

    Eigen::Index n() const { return z.size(); }
    Eigen::Index n_treated() const { return static_cast<Eigen::Index>(z.sum()); }
    Eigen::Index n_control() const { return n() - n_treated(); }
};

inline void write_dataset_csv(const SimDataset& ds, const std::string& path) {
    csv::Writer w(path);
    w.field("x1").field("x2").field("x3").field("x4").field("x5").field("x6");
    w.field("z").field("y_obs").field("y0").field("y1").field("e_true");
    w.end_row();
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        for (int j = 0; j < 6; ++j) w.field(ds.x(i, j));
        w.field(ds.z(i)).field(ds.y_obs(i)).field(ds.y0(i)).field(ds.y1(i)).field(ds.e_true(i));
        w.end_row();
    }
}

inline SimDataset read_dataset_csv(const std::string& path) {
    csv::Table t = csv::read_table(path);
    const char* names[11] = {"x1", "x2", "x3", "x4",    "x5", "x6",
                             "z",  "y_obs", "y0", "y1", "e_true"};
    int col[11];
    for (int k = 0; k < 11; ++k) {
        col[k] = t.column(names[k]);
        if (col[k] < 0) throw std::runtime_error(path + ": missing column " + names[k]);
    }
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    SimDataset ds;
    ds.x.resize(n, 6);
    ds.z.resize(n);
    ds.y_obs.resize(n);
    ds.y0.resize(n);
    ds.y1.resize(n);
    ds.e_true.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = t.rows[static_cast<std::size_t>(i)];
        auto ctx = [&](int k) { return path + " row " + std::to_string(i + 2) + " col " + names[k]; };
        for (int j = 0; j < 6; ++j) ds.x(i, j) = csv::parse_double(row[col[j]], ctx(j));
        ds.z(i) = csv::parse_double(row[col[6]], ctx(6));
        ds.y_obs(i) = csv::parse_double(row[col[7]], ctx(7));
        ds.y0(i) = csv::parse_double(row[col[8]], ctx(8));
        ds.y1(i) = csv::parse_double(row[col[9]], ctx(9));
        ds.e_true(i) = csv::parse_double(row[col[10]], ctx(10));
    }
    return ds;
}

} // namespace drsim
