#include <algorithm>
#include <cmath>

#include "mad/conformal.hpp"

namespace mad::conformal {

ConformalCalibration calibrate(std::span<const double> calibration_scores) {
    if (calibration_scores.empty())
        raise(Err::empty_calibration, "conformal calibration needs at least one normal score");
    for (double s : calibration_scores)
        if (!std::isfinite(s)) raise(Err::numeric_error, "non-finite calibration score");
    ConformalCalibration cal;
    cal.sorted_scores.assign(calibration_scores.begin(), calibration_scores.end());
    std::sort(cal.sorted_scores.begin(), cal.sorted_scores.end());
    return cal;
}

double p_value(const ConformalCalibration& cal, double score) {
    // #{A(x_j) >= score} via the first position not below score
    const auto first_ge =
        std::lower_bound(cal.sorted_scores.begin(), cal.sorted_scores.end(), score);
    const auto count_ge = static_cast<double>(cal.sorted_scores.end() - first_ge);
    return (1.0 + count_ge) / (static_cast<double>(cal.n()) + 1.0);
}

bool decide(double p, double alpha_cf) {
    if (!(alpha_cf > 0.0 && alpha_cf < 1.0)) raise(Err::config_error, "alpha_cf must be in (0,1)");
    return p <= alpha_cf;
}

} // namespace mad::conformal
