#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mad/coordinator.hpp"

namespace mad::coord {

WeightVector eg_update(const WeightVector& alpha, std::span<const double> losses, double eta) {
    if (alpha.size() != losses.size())
        raise(Err::dimension_mismatch, "weights and losses differ in length");
    if (!(eta > 0.0)) raise(Err::config_error, "eta must be > 0");
    double min_loss = losses[0];
    for (double l : losses) {
        if (!std::isfinite(l)) raise(Err::numeric_error, "non-finite loss in EG update");
        min_loss = std::min(min_loss, l);
    }
    // shifting by the minimum keeps exponents in a safe range for any eta
    std::vector<double> next(alpha.size());
    double z = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        next[i] = alpha[i] * std::exp(-eta * (losses[i] - min_loss));
        z += next[i];
    }
    if (!(z > 0.0)) raise(Err::not_normalizable, "EG normalizer vanished");
    for (double& w : next) w /= z;
    return WeightVector::validated(std::move(next));
}

WeightVector eg_update(const WeightVector& alpha, const SynthesizedLoss& losses, double eta) {
    return eg_update(alpha, std::span<const double>(losses.total), eta);
}

double aggregate_score(const WeightVector& alpha, const std::vector<Message>& messages) {
    if (alpha.size() != messages.size())
        raise(Err::dimension_mismatch, "weights and messages differ in length");
    double s = 0.0;
    for (size_t i = 0; i < messages.size(); ++i) s += alpha[i] * messages[i].score;
    return s;
}

void RegretLedger::add_round(const WeightVector& alpha_before, std::span<const double> losses) {
    if (per_agent_loss.empty()) per_agent_loss.assign(losses.size(), 0.0);
    if (per_agent_loss.size() != losses.size())
        raise(Err::dimension_mismatch, "ledger agent count changed mid-run");
    for (size_t i = 0; i < losses.size(); ++i) {
        mixture_loss += alpha_before[i] * losses[i];
        per_agent_loss[i] += losses[i];
    }
    ++rounds;
}

void RegretLedger::merge(const RegretLedger& other) {
    if (other.rounds == 0) return;
    if (per_agent_loss.empty()) per_agent_loss.assign(other.per_agent_loss.size(), 0.0);
    if (per_agent_loss.size() != other.per_agent_loss.size())
        raise(Err::dimension_mismatch, "ledger agent count changed mid-run");
    mixture_loss += other.mixture_loss;
    for (size_t i = 0; i < per_agent_loss.size(); ++i) per_agent_loss[i] += other.per_agent_loss[i];
    rounds += other.rounds;
}

double RegretLedger::regret() const {
    if (per_agent_loss.empty()) return 0.0;
    return mixture_loss - *std::min_element(per_agent_loss.begin(), per_agent_loss.end());
}

RegretCheck regret_check(const RegretLedger& ledger, size_t n_agents, double eta, size_t rounds) {
    RegretCheck out;
    out.regret = ledger.regret();
    out.bound = std::log(static_cast<double>(n_agents)) / eta +
                eta * static_cast<double>(rounds) / 8.0;
    out.slack = out.bound - out.regret;
    out.holds = out.regret <= out.bound;
    return out;
}

RowInputs prepare_row_inputs(const agents::AgentPool& pool,
                             const std::vector<ScoreNormalizer>& normalizers,
                             const agents::ConfidenceModel& confidence_model,
                             const synth::PerturbationModel& perturbation,
                             std::span<const double> row, const std::string& input_id,
                             std::optional<int> label, const MadConfig& config) {
    if (normalizers.size() != pool.size())
        raise(Err::dimension_mismatch, "one normalizer per agent expected");

    RowInputs inputs;
    inputs.input_id = input_id;
    inputs.messages.reserve(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
        Message m;
        m.agent_id = i;
        m.score = normalizers[i](pool.raw_score(i, row));
        m.confidence = agents::confidence(confidence_model, pool, i, row);
        m.evidence.attribution = pool.occlusion_attribution(i, row);
        inputs.messages.push_back(std::move(m));
    }
    const StreamRng row_rng = StreamRng(config.seed).stream("row").stream(input_id);
    inputs.pred_losses = synth::compute_pred_losses(pool, normalizers, inputs.messages, row, label,
                                                    config, perturbation, row_rng);
    return inputs;
}

DebateResult debate_prepared(const RowInputs& inputs, const MadConfig& config,
                             const WeightVector& initial_weights,
                             const std::string& config_digest) {
    if (inputs.messages.empty()) raise(Err::single_agent, "debate needs at least one agent");
    config.validate();

    DebateResult result;
    result.trace.input_id = inputs.input_id;
    result.trace.config_digest = config_digest;

    CoordinatorState state{1, initial_weights};
    for (int t = 0; t < config.rounds_T; ++t) {
        const double aggregate = aggregate_score(state.weights, inputs.messages);
        auto [loss, next_state] = synth::synthesize(state, inputs.messages, inputs.pred_losses, config);
        const WeightVector updated = eg_update(state.weights, loss, config.eta);
        result.ledger.add_round(state.weights, loss.total);

        RoundRecord record;
        record.messages = inputs.messages;
        record.losses = std::move(loss);
        record.weights_before = state.weights;
        record.weights_after = updated;
        record.aggregate_score = aggregate;
        result.trace.rounds.push_back(std::move(record));

        state = CoordinatorState{next_state.round, updated};
    }

    result.final_weights = state.weights;
    const WeightVector& scoring_weights = config.final_weights == FinalWeights::post
                                              ? state.weights
                                              : result.trace.rounds.back().weights_before;
    result.final_score = aggregate_score(scoring_weights, inputs.messages);
    result.trace.final_score = result.final_score;
    validate_trace(result.trace);
    return result;
}

DebateResult debate(const agents::AgentPool& pool, const std::vector<ScoreNormalizer>& normalizers,
                    const agents::ConfidenceModel& confidence_model,
                    const synth::PerturbationModel& perturbation, std::span<const double> row,
                    const std::string& input_id, std::optional<int> label, const MadConfig& config,
                    const std::string& config_digest) {
    const RowInputs inputs = prepare_row_inputs(pool, normalizers, confidence_model, perturbation,
                                                row, input_id, label, config);
    return debate_prepared(inputs, config, WeightVector::uniform(pool.size()), config_digest);
}

const char* stream_mode_name(StreamMode mode) {
    return mode == StreamMode::per_input_reset ? "per_input_reset" : "persistent_weights";
}

std::optional<StreamMode> stream_mode_from_name(const std::string& name) {
    if (name == "per_input_reset") return StreamMode::per_input_reset;
    if (name == "persistent_weights") return StreamMode::persistent_weights;
    return std::nullopt;
}

StreamResult run_stream(const Matrix& rows, const std::vector<std::string>& input_ids,
                        const std::optional<std::vector<int8_t>>& labels,
                        const agents::AgentPool& pool,
                        const std::vector<ScoreNormalizer>& normalizers,
                        const agents::ConfidenceModel& confidence_model,
                        const synth::PerturbationModel& perturbation, const MadConfig& config,
                        StreamMode mode, int workers, const std::string& config_digest) {
    if (input_ids.size() != rows.rows)
        raise(Err::dimension_mismatch, "one input id per row expected");
    if (labels && labels->size() != rows.rows)
        raise(Err::dimension_mismatch, "one label per row expected");

    StreamResult result;
    result.final_weights = WeightVector::uniform(std::max<size_t>(pool.size(), 1));
    result.scores.resize(rows.rows);
    result.agent_scores.resize(rows.rows);
    result.traces.resize(rows.rows);
    if (rows.rows == 0) {
        result.regret = regret_check(result.ledger, pool.size(), config.eta, 0);
        return result;
    }

    auto label_of = [&](size_t r) -> std::optional<int> {
        if (!labels) return std::nullopt;
        return static_cast<int>((*labels)[r]);
    };

    if (mode == StreamMode::per_input_reset) {
        std::vector<RegretLedger> ledgers(rows.rows);
        std::vector<double> slacks(rows.rows);

        auto process = [&](size_t r) {
            const RowInputs inputs =
                prepare_row_inputs(pool, normalizers, confidence_model, perturbation, rows.row(r),
                                   input_ids[r], label_of(r), config);
            DebateResult dr = debate_prepared(inputs, config, WeightVector::uniform(pool.size()),
                                              config_digest);
            result.scores[r] = dr.final_score;
            result.agent_scores[r].resize(inputs.messages.size());
            for (size_t i = 0; i < inputs.messages.size(); ++i)
                result.agent_scores[r][i] = inputs.messages[i].score;
            result.traces[r] = std::move(dr.trace);
            ledgers[r] = std::move(dr.ledger);
            slacks[r] = regret_check(ledgers[r], pool.size(), config.eta,
                                     static_cast<size_t>(config.rounds_T))
                            .slack;
        };

        int n_workers = workers > 0 ? workers
                                    : static_cast<int>(std::thread::hardware_concurrency());
        n_workers = std::clamp(n_workers, 1, static_cast<int>(rows.rows));
        if (n_workers == 1) {
            for (size_t r = 0; r < rows.rows; ++r) process(r);
        } else {
            std::atomic<size_t> cursor{0};
            std::vector<std::thread> threads;
            threads.reserve(static_cast<size_t>(n_workers));
            for (int w = 0; w < n_workers; ++w)
                threads.emplace_back([&] {
                    for (size_t r = cursor.fetch_add(1); r < rows.rows; r = cursor.fetch_add(1))
                        process(r);
                });
            for (std::thread& t : threads) t.join();
        }

        for (size_t r = 0; r < rows.rows; ++r) result.ledger.merge(ledgers[r]);
        result.worst_row_slack = *std::min_element(slacks.begin(), slacks.end());
        // concatenated reset sequences: total regret <= rows * per-row bound
        const RegretCheck per_row_bound =
            regret_check(RegretLedger{}, pool.size(), config.eta, static_cast<size_t>(config.rounds_T));
        result.regret.regret = result.ledger.regret();
        result.regret.bound = per_row_bound.bound * static_cast<double>(rows.rows);
        result.regret.slack = result.regret.bound - result.regret.regret;
        result.regret.holds = result.worst_row_slack >= 0.0;
    } else {
        WeightVector alpha = WeightVector::uniform(pool.size());
        for (size_t r = 0; r < rows.rows; ++r) {
            const RowInputs inputs =
                prepare_row_inputs(pool, normalizers, confidence_model, perturbation, rows.row(r),
                                   input_ids[r], label_of(r), config);
            DebateResult dr = debate_prepared(inputs, config, alpha, config_digest);
            alpha = dr.final_weights;
            result.scores[r] = dr.final_score;
            result.agent_scores[r].resize(inputs.messages.size());
            for (size_t i = 0; i < inputs.messages.size(); ++i)
                result.agent_scores[r][i] = inputs.messages[i].score;
            result.traces[r] = std::move(dr.trace);
            result.ledger.merge(dr.ledger);
        }
        result.final_weights = alpha;
        result.regret = regret_check(result.ledger, pool.size(), config.eta, result.ledger.rounds);
        result.worst_row_slack = result.regret.slack;
    }
    return result;
}

} // namespace mad::coord
