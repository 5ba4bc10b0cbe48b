#include <algorithm>
#include <cmath>

#include "mad/log.hpp"
#include "mad/normalize.hpp"

namespace mad {

const char* normalizer_kind_name(NormalizerKind kind) {
    switch (kind) {
        case NormalizerKind::rank_percentile: return "rank_percentile";
        case NormalizerKind::min_max: return "min_max";
        case NormalizerKind::z_sigmoid: return "z_sigmoid";
    }
    return "?";
}

std::optional<NormalizerKind> normalizer_kind_from_name(const std::string& name) {
    if (name == "rank_percentile") return NormalizerKind::rank_percentile;
    if (name == "min_max") return NormalizerKind::min_max;
    if (name == "z_sigmoid") return NormalizerKind::z_sigmoid;
    return std::nullopt;
}

ScoreNormalizer ScoreNormalizer::fit(NormalizerKind kind, std::span<const double> train_scores) {
    if (train_scores.empty()) raise(Err::empty_scores, "normalizer fit needs at least one score");

    ScoreNormalizer nu;
    nu.kind_ = kind;
    switch (kind) {
        case NormalizerKind::rank_percentile: {
            nu.sorted_scores_.assign(train_scores.begin(), train_scores.end());
            std::sort(nu.sorted_scores_.begin(), nu.sorted_scores_.end());
            break;
        }
        case NormalizerKind::min_max: {
            const auto [lo, hi] = std::minmax_element(train_scores.begin(), train_scores.end());
            nu.lo_ = *lo;
            nu.hi_ = *hi;
            if (nu.hi_ - nu.lo_ <= 0.0) {
                nu.degenerate_ = true;
                log::warn("min_max normalizer fit on constant scores; mapping everything to 0.5");
            }
            break;
        }
        case NormalizerKind::z_sigmoid: {
            double mean = 0.0;
            for (double s : train_scores) mean += s;
            mean /= static_cast<double>(train_scores.size());
            double ss = 0.0;
            for (double s : train_scores) ss += (s - mean) * (s - mean);
            nu.mean_ = mean;
            nu.std_ = std::max(std::sqrt(ss / static_cast<double>(train_scores.size())), kStdFloor);
            break;
        }
    }
    return nu;
}

double ScoreNormalizer::operator()(double raw_score) const {
    switch (kind_) {
        case NormalizerKind::rank_percentile: {
            const auto count = std::upper_bound(sorted_scores_.begin(), sorted_scores_.end(),
                                                raw_score) -
                               sorted_scores_.begin();
            return static_cast<double>(count) / static_cast<double>(sorted_scores_.size() + 1);
        }
        case NormalizerKind::min_max: {
            if (degenerate_) return 0.5;
            return std::clamp((raw_score - lo_) / (hi_ - lo_), 0.0, 1.0);
        }
        case NormalizerKind::z_sigmoid: {
            const double z = (raw_score - mean_) / std_;
            return 1.0 / (1.0 + std::exp(-z));
        }
    }
    return 0.5;
}

} // namespace mad
