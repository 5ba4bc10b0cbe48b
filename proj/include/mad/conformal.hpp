#pragma once
// Split-conformal wrapper: converts debated scores into p-values with
// finite-sample false-positive control under exchangeability of normals.

#include <span>
#include <vector>

#include "mad/types.hpp"

namespace mad::conformal {

struct ConformalCalibration {
    std::vector<double> sorted_scores; // calibration normals, ascending

    size_t n() const { return sorted_scores.size(); }
};

// raises empty_calibration on an empty score set
ConformalCalibration calibrate(std::span<const double> calibration_scores);

// p(x) = (1 + #{calibration scores >= A(x)}) / (n + 1); ties counted inclusively
double p_value(const ConformalCalibration& cal, double score);

// flag anomalous iff p <= alpha_cf (inclusive)
bool decide(double p, double alpha_cf);

} // namespace mad::conformal
