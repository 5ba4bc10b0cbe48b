#include <algorithm>
#include <cmath>

#include "mad/synthesis.hpp"

namespace mad::synth {

std::vector<double> unit_evidence(std::span<const double> attribution) {
    double norm_sq = 0.0;
    for (double a : attribution) norm_sq += a * a;
    std::vector<double> out(attribution.begin(), attribution.end());
    if (norm_sq <= 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& a : out) a *= inv;
    return out;
}

ConsensusEvidence consensus_attribution(const WeightVector& weights,
                                        const std::vector<std::vector<double>>& unit_evidences) {
    if (weights.size() != unit_evidences.size())
        raise(Err::dimension_mismatch, "one unit evidence vector per agent expected");
    const size_t d = unit_evidences.empty() ? 0 : unit_evidences.front().size();
    for (const auto& e : unit_evidences)
        if (e.size() != d) raise(Err::dimension_mismatch, "evidence vectors differ in dimension");

    ConsensusEvidence out;
    out.consensus.assign(d, 0.0);
    for (size_t i = 0; i < unit_evidences.size(); ++i)
        for (size_t j = 0; j < d; ++j) out.consensus[j] += weights[i] * unit_evidences[i][j];
    out.consensus_unit = unit_evidence(out.consensus);
    return out;
}

double pred_loss_supervised(double score, int label, double epsilon) {
    const double y = label == 1 ? 1.0 : 0.0;
    return -y * std::log(std::max(score, epsilon)) -
           (1.0 - y) * std::log(std::max(1.0 - score, epsilon));
}

PerturbationModel fit_perturbation(const PerturbationSpec& spec, const Matrix& train) {
    PerturbationModel model;
    model.spec = spec;
    model.feature_std.assign(train.cols, 0.0);
    if (train.rows == 0) raise(Err::empty_train, "perturbation model needs train rows");
    for (size_t c = 0; c < train.cols; ++c) {
        double mean = 0.0;
        for (size_t r = 0; r < train.rows; ++r) mean += train.at(r, c);
        mean /= static_cast<double>(train.rows);
        double ss = 0.0;
        for (size_t r = 0; r < train.rows; ++r) {
            const double diff = train.at(r, c) - mean;
            ss += diff * diff;
        }
        model.feature_std[c] = std::sqrt(ss / static_cast<double>(train.rows));
    }
    return model;
}

std::vector<std::vector<double>> perturb_row(const PerturbationModel& model,
                                             std::span<const double> row, StreamRng rng) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(model.spec.samples_K));
    for (int k = 0; k < model.spec.samples_K; ++k) {
        std::vector<double> perturbed(row.begin(), row.end());
        for (size_t j = 0; j < perturbed.size(); ++j)
            perturbed[j] += rng.normal() * model.spec.noise_scale * model.feature_std[j];
        out.push_back(std::move(perturbed));
    }
    return out;
}

double pred_loss_unsupervised(const agents::AgentPool& pool, size_t agent,
                              const ScoreNormalizer& nu, std::span<const double> row,
                              const std::vector<std::vector<double>>& perturbed_rows) {
    const double base = nu(pool.raw_score(agent, row));
    double total = 0.0;
    for (const auto& perturbed : perturbed_rows)
        total += std::abs(base - nu(pool.raw_score(agent, perturbed)));
    return total / static_cast<double>(perturbed_rows.size());
}

double dispute_loss(const Message& message, double aggregate_score) {
    const double gap = message.score - aggregate_score;
    return message.confidence * gap * gap;
}

double evidence_loss(const Message& message, std::span<const double> consensus_unit) {
    double norm_a = 0.0, norm_c = 0.0, dot = 0.0;
    const std::vector<double>& a = message.evidence.attribution;
    if (a.size() != consensus_unit.size())
        raise(Err::dimension_mismatch, "attribution and consensus differ in dimension");
    for (size_t j = 0; j < a.size(); ++j) {
        norm_a += a[j] * a[j];
        norm_c += consensus_unit[j] * consensus_unit[j];
        dot += a[j] * consensus_unit[j];
    }
    if (norm_a <= 0.0 || norm_c <= 0.0) return 0.0; // zero-evidence convention
    const double cosine = dot / std::sqrt(norm_a * norm_c);
    return message.confidence * (1.0 - cosine);
}

double total_loss(double pred, double dispute, double evidence, double lambda, double gamma) {
    return std::clamp(pred + lambda * dispute + gamma * evidence, 0.0, 1.0);
}

std::vector<double> compute_pred_losses(const agents::AgentPool& pool,
                                        const std::vector<ScoreNormalizer>& normalizers,
                                        const std::vector<Message>& messages,
                                        std::span<const double> row,
                                        std::optional<int> label, const MadConfig& config,
                                        const PerturbationModel& perturbation, StreamRng row_rng) {
    const size_t n = messages.size();
    std::vector<double> pred(n, 0.0);
    if (config.supervised && label) {
        for (size_t i = 0; i < n; ++i)
            pred[i] = pred_loss_supervised(messages[i].score, *label, config.epsilon);
        return pred;
    }
    const auto perturbed = perturb_row(perturbation, row, row_rng.stream("pert"));
    for (size_t i = 0; i < n; ++i)
        pred[i] = pred_loss_unsupervised(pool, i, normalizers[i], row, perturbed);
    return pred;
}

std::pair<SynthesizedLoss, CoordinatorState> synthesize(const CoordinatorState& state,
                                                        const std::vector<Message>& messages,
                                                        std::span<const double> pred_losses,
                                                        const MadConfig& config) {
    const size_t n = messages.size();
    if (state.weights.size() != n)
        raise(Err::dimension_mismatch, "weight vector and message count disagree");
    if (pred_losses.size() != n)
        raise(Err::dimension_mismatch, "pred loss vector and message count disagree");

    // pre-update aggregate of the current round
    double aggregate = 0.0;
    for (size_t i = 0; i < n; ++i) aggregate += state.weights[i] * messages[i].score;

    std::vector<std::vector<double>> units;
    units.reserve(n);
    for (const Message& m : messages) units.push_back(unit_evidence(m.evidence.attribution));
    const ConsensusEvidence consensus = consensus_attribution(state.weights, units);

    SynthesizedLoss loss;
    loss.pred.assign(pred_losses.begin(), pred_losses.end());
    loss.dispute.resize(n);
    loss.evidence.resize(n);
    loss.total.resize(n);
    for (size_t i = 0; i < n; ++i) {
        loss.dispute[i] = dispute_loss(messages[i], aggregate);
        // cosine is scale-invariant, so the raw attribution stands in for its unit form
        loss.evidence[i] = evidence_loss(messages[i], consensus.consensus_unit);
        loss.total[i] =
            total_loss(loss.pred[i], loss.dispute[i], loss.evidence[i], config.lambda, config.gamma);
    }

    CoordinatorState next = state;
    next.round = state.round + 1;
    return {std::move(loss), std::move(next)};
}

} // namespace mad::synth
