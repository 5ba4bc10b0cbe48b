#pragma once
// Per-agent monotone maps sending raw detector scores into [0,1] so scores
// are comparable across model families. Fit on train-split raw scores only.

#include <span>
#include <string>
#include <vector>

#include "mad/types.hpp"

namespace mad {

enum class NormalizerKind : uint8_t { rank_percentile, min_max, z_sigmoid };

const char* normalizer_kind_name(NormalizerKind kind);
std::optional<NormalizerKind> normalizer_kind_from_name(const std::string& name);

class ScoreNormalizer {
public:
    // raises empty_scores on an empty fit set
    static ScoreNormalizer fit(NormalizerKind kind, std::span<const double> train_scores);

    // rank_percentile: #{train <= s} / (n+1)
    // min_max:         clip((s - min)/(max - min), 0, 1); 0.5 when degenerate
    // z_sigmoid:       1 / (1 + exp(-(s - mean)/std))
    double operator()(double raw_score) const;

    NormalizerKind kind() const { return kind_; }
    bool degenerate() const { return degenerate_; }

private:
    ScoreNormalizer() = default;
    NormalizerKind kind_ = NormalizerKind::rank_percentile;
    std::vector<double> sorted_scores_; // rank_percentile
    double lo_ = 0.0, hi_ = 0.0;        // min_max
    double mean_ = 0.0, std_ = 1.0;     // z_sigmoid
    bool degenerate_ = false;
};

inline ScoreNormalizer fit_normalizer(NormalizerKind kind, std::span<const double> train_scores) {
    return ScoreNormalizer::fit(kind, train_scores);
}

inline double normalize(const ScoreNormalizer& nu, double raw_score) { return nu(raw_score); }

} // namespace mad
