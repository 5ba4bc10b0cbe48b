#pragma once
// The detector pool: a uniform fit/score contract, five built-in
// heterogeneous detectors, occlusion attribution, and bootstrap-variance
// confidence. Raw scores carry no scale guarantees; normalization is a
// separate stage.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mad/rng.hpp"
#include "mad/types.hpp"

namespace mad::agents {

enum class DetectorKind : uint8_t { mahalanobis, knn_dist, histogram, iforest, pca_recon };

const char* detector_kind_name(DetectorKind kind);
std::optional<DetectorKind> detector_kind_from_name(const std::string& name);

struct DetectorConfig {
    int knn_k = 10;
    int iforest_trees = 100;
    int iforest_subsample = 256;
    int histogram_bins = 20;
    double pca_variance_kept = 0.90;
};

// fit(...) then raw_score(row); higher means more anomalous. Scoring is
// deterministic given the fitted state and finite for finite inputs.
class Detector {
public:
    virtual ~Detector() = default;
    // labels may be null; none of the built-ins use them (forwarded for
    // external agents implementing the same contract)
    virtual void fit(const Matrix& train, const int8_t* labels, StreamRng rng) = 0;
    virtual double raw_score(std::span<const double> row) const = 0;
    virtual const char* name() const = 0;
};

std::unique_ptr<Detector> make_detector(DetectorKind kind, const DetectorConfig& config);

struct PoolConfig {
    std::vector<DetectorKind> detectors = {DetectorKind::mahalanobis, DetectorKind::knn_dist,
                                           DetectorKind::histogram, DetectorKind::iforest,
                                           DetectorKind::pca_recon};
    DetectorConfig detector;
    int bootstrap_replicates = 16; // B >= 2
};

class AgentPool {
public:
    size_t size() const { return agents_.size(); }
    size_t feature_dim() const { return feature_dim_; }
    int bootstrap_count() const { return bootstrap_count_; }
    const char* agent_name(size_t agent) const { return agents_[agent]->name(); }

    double raw_score(size_t agent, std::span<const double> row) const;
    std::vector<double> raw_scores(std::span<const double> row) const;
    std::vector<double> raw_scores_all_rows(size_t agent, const Matrix& rows) const;

    double replicate_score(size_t agent, size_t replicate, std::span<const double> row) const;
    // population variance of the B replicate raw scores at this row
    double replicate_variance(size_t agent, std::span<const double> row) const;

    // a_j = s_i(row) - s_i(row with feature j set to the train median of j)
    std::vector<double> occlusion_attribution(size_t agent, std::span<const double> row) const;

    std::span<const double> train_medians() const { return train_medians_; }

    friend AgentPool fit_pool(const Matrix& train, const std::optional<std::vector<int8_t>>& labels,
                              const PoolConfig& config, uint64_t seed);

private:
    std::vector<std::unique_ptr<Detector>> agents_;
    std::vector<std::vector<std::unique_ptr<Detector>>> replicates_; // [agent][b]
    std::vector<double> train_medians_; // per preprocessed feature
    size_t feature_dim_ = 0;
    int bootstrap_count_ = 0;
};

// Fits every configured detector plus B bootstrap replicates each (row
// resampling with replacement, seeded). Raises degenerate_train when every
// column has zero variance.
AgentPool fit_pool(const Matrix& train, const std::optional<std::vector<int8_t>>& labels,
                   const PoolConfig& config, uint64_t seed);

// ---------------------------------------------------------------------------
// confidence

struct ConfidenceModel {
    int replicate_count = 0;
    std::vector<double> v_ref; // per agent, median bootstrap variance on validation, floored
};

ConfidenceModel calibrate_confidence(const AgentPool& pool, const Matrix& validation);

// c = 1 / (1 + v / v_ref); 1 at v=0, 0.5 at v=v_ref, decreasing in v
double confidence(const ConfidenceModel& model, const AgentPool& pool, size_t agent,
                  std::span<const double> row);

} // namespace mad::agents
