#include <algorithm>
#include <cmath>

#include "mad/agents.hpp"

namespace mad::agents {

namespace {

Matrix resample_rows(const Matrix& train, StreamRng& rng) {
    Matrix out(train.rows, train.cols);
    for (size_t r = 0; r < train.rows; ++r) {
        const size_t pick = static_cast<size_t>(rng.below(train.rows));
        std::copy_n(train.data.data() + pick * train.cols, train.cols, out.row(r));
    }
    return out;
}

} // namespace

AgentPool fit_pool(const Matrix& train, const std::optional<std::vector<int8_t>>& labels,
                   const PoolConfig& config, uint64_t seed) {
    if (train.rows == 0 || train.cols == 0) raise(Err::empty_train, "empty train matrix");
    if (config.detectors.empty()) raise(Err::config_error, "agent pool has no detectors");
    if (config.bootstrap_replicates < 2)
        raise(Err::config_error, "bootstrap replicate count must be >= 2");

    bool any_variance = false;
    for (size_t c = 0; c < train.cols && !any_variance; ++c) {
        const double first = train.at(0, c);
        for (size_t r = 1; r < train.rows; ++r)
            if (train.at(r, c) != first) {
                any_variance = true;
                break;
            }
    }
    if (!any_variance) raise(Err::degenerate_train, "every train column has zero variance");

    const int8_t* label_ptr = labels ? labels->data() : nullptr;

    AgentPool pool;
    pool.feature_dim_ = train.cols;
    pool.bootstrap_count_ = config.bootstrap_replicates;
    const StreamRng root = StreamRng(seed).stream("pool");

    for (DetectorKind kind : config.detectors) {
        const StreamRng agent_rng = root.stream(detector_kind_name(kind));
        auto main = make_detector(kind, config.detector);
        main->fit(train, label_ptr, agent_rng.stream("fit"));
        pool.agents_.push_back(std::move(main));

        std::vector<std::unique_ptr<Detector>> reps;
        for (int b = 0; b < config.bootstrap_replicates; ++b) {
            StreamRng boot_rng = agent_rng.stream("boot").stream(static_cast<uint64_t>(b));
            const Matrix resampled = resample_rows(train, boot_rng);
            auto rep = make_detector(kind, config.detector);
            rep->fit(resampled, label_ptr, agent_rng.stream("bootfit").stream(static_cast<uint64_t>(b)));
            reps.push_back(std::move(rep));
        }
        pool.replicates_.push_back(std::move(reps));
    }

    // per-feature train medians back the occlusion explainer
    pool.train_medians_.resize(train.cols);
    std::vector<double> column(train.rows);
    for (size_t c = 0; c < train.cols; ++c) {
        for (size_t r = 0; r < train.rows; ++r) column[r] = train.at(r, c);
        std::sort(column.begin(), column.end());
        const size_t n = train.rows;
        pool.train_medians_[c] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return pool;
}

double AgentPool::raw_score(size_t agent, std::span<const double> row) const {
    return agents_[agent]->raw_score(row);
}

std::vector<double> AgentPool::raw_scores(std::span<const double> row) const {
    std::vector<double> out(agents_.size());
    for (size_t i = 0; i < agents_.size(); ++i) out[i] = agents_[i]->raw_score(row);
    return out;
}

std::vector<double> AgentPool::raw_scores_all_rows(size_t agent, const Matrix& rows) const {
    std::vector<double> out(rows.rows);
    for (size_t r = 0; r < rows.rows; ++r) out[r] = agents_[agent]->raw_score(rows.row(r));
    return out;
}

double AgentPool::replicate_score(size_t agent, size_t replicate, std::span<const double> row) const {
    return replicates_[agent][replicate]->raw_score(row);
}

double AgentPool::replicate_variance(size_t agent, std::span<const double> row) const {
    const auto& reps = replicates_[agent];
    double mean = 0.0;
    std::vector<double> scores(reps.size());
    for (size_t b = 0; b < reps.size(); ++b) {
        scores[b] = reps[b]->raw_score(row);
        mean += scores[b];
    }
    mean /= static_cast<double>(reps.size());
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    return var / static_cast<double>(reps.size());
}

std::vector<double> AgentPool::occlusion_attribution(size_t agent, std::span<const double> row) const {
    if (row.size() != feature_dim_)
        raise(Err::dimension_mismatch, "attribution row dimension mismatch");
    const double base = agents_[agent]->raw_score(row);
    std::vector<double> probe(row.begin(), row.end());
    std::vector<double> attribution(feature_dim_);
    for (size_t j = 0; j < feature_dim_; ++j) {
        const double saved = probe[j];
        probe[j] = train_medians_[j];
        attribution[j] = base - agents_[agent]->raw_score(probe);
        probe[j] = saved;
    }
    return attribution;
}

ConfidenceModel calibrate_confidence(const AgentPool& pool, const Matrix& validation) {
    if (validation.rows == 0)
        raise(Err::insufficient_rows, "confidence calibration needs a nonempty validation split");

    ConfidenceModel model;
    model.replicate_count = pool.bootstrap_count();
    model.v_ref.resize(pool.size());
    std::vector<double> variances(validation.rows);
    for (size_t agent = 0; agent < pool.size(); ++agent) {
        for (size_t r = 0; r < validation.rows; ++r)
            variances[r] = pool.replicate_variance(agent, validation.row(r));
        std::sort(variances.begin(), variances.end());
        const size_t n = variances.size();
        const double median =
            n % 2 == 1 ? variances[n / 2] : 0.5 * (variances[n / 2 - 1] + variances[n / 2]);
        model.v_ref[agent] = std::max(median, kStdFloor);
    }
    return model;
}

double confidence(const ConfidenceModel& model, const AgentPool& pool, size_t agent,
                  std::span<const double> row) {
    const double v = pool.replicate_variance(agent, row);
    return 1.0 / (1.0 + v / model.v_ref[agent]);
}

} // namespace mad::agents
