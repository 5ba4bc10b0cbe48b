#pragma once
// The debate loop: per-round message collection, synthesis, exponentiated-
// gradient trust update, final scoring, trace assembly, and regret
// accounting against the (log N)/eta + eta*T/8 bound.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mad/agents.hpp"
#include "mad/normalize.hpp"
#include "mad/synthesis.hpp"
#include "mad/types.hpp"

namespace mad::coord {

// alpha'_i = alpha_i exp(-eta loss_i) / sum_j alpha_j exp(-eta loss_j)
WeightVector eg_update(const WeightVector& alpha, std::span<const double> losses, double eta);
WeightVector eg_update(const WeightVector& alpha, const SynthesizedLoss& losses, double eta);

double aggregate_score(const WeightVector& alpha, const std::vector<Message>& messages);

struct RegretLedger {
    double mixture_loss = 0.0;
    std::vector<double> per_agent_loss;
    size_t rounds = 0;

    void add_round(const WeightVector& alpha_before, std::span<const double> losses);
    void merge(const RegretLedger& other);
    double regret() const; // mixture - best fixed agent in hindsight
};

struct RegretCheck {
    bool holds = false;
    double regret = 0.0;
    double bound = 0.0;
    double slack = 0.0; // bound - regret
};

RegretCheck regret_check(const RegretLedger& ledger, size_t n_agents, double eta, size_t rounds);

// ---------------------------------------------------------------------------
// per-row debate

// Everything about a row the debate needs but that does not change across
// rounds or across (eta, lambda, gamma, T): messages and prediction losses.
struct RowInputs {
    std::string input_id;
    std::vector<Message> messages;
    std::vector<double> pred_losses;
};

RowInputs prepare_row_inputs(const agents::AgentPool& pool,
                             const std::vector<ScoreNormalizer>& normalizers,
                             const agents::ConfidenceModel& confidence_model,
                             const synth::PerturbationModel& perturbation,
                             std::span<const double> row, const std::string& input_id,
                             std::optional<int> label, const MadConfig& config);

struct DebateResult {
    double final_score = 0.0;
    DebateTrace trace;
    RegretLedger ledger;
    WeightVector final_weights = WeightVector::uniform(1); // alpha^(T+1)
};

DebateResult debate_prepared(const RowInputs& inputs, const MadConfig& config,
                             const WeightVector& initial_weights, const std::string& config_digest);

// convenience wrapper: build inputs then debate from uniform weights
DebateResult debate(const agents::AgentPool& pool, const std::vector<ScoreNormalizer>& normalizers,
                    const agents::ConfidenceModel& confidence_model,
                    const synth::PerturbationModel& perturbation, std::span<const double> row,
                    const std::string& input_id, std::optional<int> label, const MadConfig& config,
                    const std::string& config_digest);

// ---------------------------------------------------------------------------
// streaming over many rows

enum class StreamMode : uint8_t { per_input_reset, persistent_weights };

const char* stream_mode_name(StreamMode mode);
std::optional<StreamMode> stream_mode_from_name(const std::string& name);

struct StreamResult {
    std::vector<double> scores;                        // debated score per row
    std::vector<std::vector<double>> agent_scores;     // normalized scores per row
    std::vector<DebateTrace> traces;
    RegretLedger ledger;    // concatenated over all EG rounds in the run
    RegretCheck regret;     // against the mode-appropriate bound
    double worst_row_slack = 0.0; // reset mode: min over rows of per-row slack
    WeightVector final_weights = WeightVector::uniform(1);
};

// per_input_reset re-initializes uniform weights per row (rows scored in
// parallel); persistent_weights carries trust across rows, sequentially.
StreamResult run_stream(const Matrix& rows, const std::vector<std::string>& input_ids,
                        const std::optional<std::vector<int8_t>>& labels,
                        const agents::AgentPool& pool,
                        const std::vector<ScoreNormalizer>& normalizers,
                        const agents::ConfidenceModel& confidence_model,
                        const synth::PerturbationModel& perturbation, const MadConfig& config,
                        StreamMode mode, int workers, const std::string& config_digest);

} // namespace mad::coord
