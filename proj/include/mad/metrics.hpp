#pragma once
// Evaluation metrics: threshold-free ranking, budgeted recall, calibration
// error, slice gap, and the disagreement diagnostics debate treats as a
// first-class signal.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mad/ingest.hpp"
#include "mad/types.hpp"

namespace mad::metrics {

// probability a random positive outranks a random negative; ties count 0.5
double roc_auc(std::span<const double> scores, std::span<const int8_t> labels);

// average precision: sum_k (R_k - R_{k-1}) P_k over descending distinct thresholds
double pr_auc(std::span<const double> scores, std::span<const int8_t> labels);

// TPR at the largest admitted set whose FPR stays within the budget;
// conservative, never exceeds the budget on the thresholding data
double recall_at_fpr(std::span<const double> scores, std::span<const int8_t> labels,
                     double fpr_budget = 0.01);
// the threshold that recall_at_fpr operates at (+inf when nothing is admitted)
double recall_at_fpr_threshold(std::span<const double> scores, std::span<const int8_t> labels,
                               double fpr_budget = 0.01);

// mean of per-class F1 at `threshold` (predict anomalous when score >= threshold);
// a class with no predictions scores 0
double macro_f1(std::span<const double> scores, std::span<const int8_t> labels, double threshold);

// expected calibration error over equal-width bins on [0,1]
double ece(std::span<const double> scores, std::span<const int8_t> labels, int bins = 15);

struct SliceMetric {
    std::string name;
    size_t rows = 0;
    std::optional<double> value; // absent when the slice was unusable
};

using MetricFn = std::function<double(std::span<const double>, std::span<const int8_t>)>;

// max minus min of the metric across usable slices (both classes present);
// raises no_usable_slices when fewer than two qualify
double slice_gap(std::span<const double> scores, std::span<const int8_t> labels,
                 const std::vector<ingest::Slice>& slices, const MetricFn& metric = roc_auc,
                 std::vector<SliceMetric>* per_slice = nullptr);

// per-row population variance of the agents' normalized scores
std::vector<double> disagreement_per_row(const std::vector<std::vector<double>>& agent_scores);

struct DisagreementSummary {
    double median = 0.0;
    double p90 = 0.0; // nearest-rank
};

DisagreementSummary disagreement_summary(std::span<const double> per_row_disagreement);

} // namespace mad::metrics
