#pragma once
// The loss-synthesis operator: turns messages, current trust weights, and the
// input into a bounded per-agent loss vector. This is where debate lives —
// confident disagreement and evidence inconsistent with the weighted
// consensus raise an agent's loss.

#include <span>
#include <vector>

#include "mad/agents.hpp"
#include "mad/normalize.hpp"
#include "mad/rng.hpp"
#include "mad/types.hpp"

namespace mad::synth {

// a / ||a||_2, or the zero vector when ||a||_2 == 0
std::vector<double> unit_evidence(std::span<const double> attribution);

struct ConsensusEvidence {
    std::vector<double> consensus;      // weighted sum of unit attributions
    std::vector<double> consensus_unit; // unit-normalized, or exactly zero
};

ConsensusEvidence consensus_attribution(const WeightVector& weights,
                                        const std::vector<std::vector<double>>& unit_evidences);

// -y log(max(s,eps)) - (1-y) log(max(1-s,eps)); unclipped here
double pred_loss_supervised(double score, int label, double epsilon);

// stability proxy: per-feature Gaussian noise scaled by the train std of the
// preprocessed feature space
struct PerturbationModel {
    PerturbationSpec spec;
    std::vector<double> feature_std; // per preprocessed feature, train split
};

PerturbationModel fit_perturbation(const PerturbationSpec& spec, const Matrix& train);

// the K perturbed copies are shared across agents; rng must be the per-row
// perturbation stream
std::vector<std::vector<double>> perturb_row(const PerturbationModel& model,
                                             std::span<const double> row, StreamRng rng);

// (1/K) sum_k |s(x) - s(x'_k)|, scores mapped through the agent's fitted
// normalizer; in [0,1] by construction
double pred_loss_unsupervised(const agents::AgentPool& pool, size_t agent,
                              const ScoreNormalizer& nu, std::span<const double> row,
                              const std::vector<std::vector<double>>& perturbed_rows);

// c_i * (s_i - aggregate)^2
double dispute_loss(const Message& message, double aggregate_score);

// c_i * (1 - cos(unit attribution, consensus_unit)); 0 when either side is zero
double evidence_loss(const Message& message, std::span<const double> consensus_unit);

// clip(pred + lambda*dispute + gamma*evidence, 0, 1)
double total_loss(double pred, double dispute, double evidence, double lambda, double gamma);

// Per-agent prediction-feedback losses for one row: the supervised
// cross-entropy when a label is present and config.supervised, the stability
// proxy otherwise. Both paths are clipped identically downstream.
std::vector<double> compute_pred_losses(const agents::AgentPool& pool,
                                        const std::vector<ScoreNormalizer>& normalizers,
                                        const std::vector<Message>& messages,
                                        std::span<const double> row,
                                        std::optional<int> label, const MadConfig& config,
                                        const PerturbationModel& perturbation, StreamRng row_rng);

// One synthesis step: aggregate under the current weights, build consensus
// evidence, combine components, clip. Weights are untouched (the EG update is
// the coordinator's job); the state advances its round counter.
std::pair<SynthesizedLoss, CoordinatorState> synthesize(const CoordinatorState& state,
                                                        const std::vector<Message>& messages,
                                                        std::span<const double> pred_losses,
                                                        const MadConfig& config);

} // namespace mad::synth
