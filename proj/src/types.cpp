#include "mad/types.hpp"

#include <cmath>
#include <cstdlib>

#include "mad/log.hpp"

namespace mad {

const char* err_name(Err code) {
    switch (code) {
        case Err::config_error: return "ConfigError";
        case Err::parse_error: return "ParseError";
        case Err::schema_mismatch: return "SchemaMismatch";
        case Err::insufficient_rows: return "InsufficientRows";
        case Err::empty_train: return "EmptyTrain";
        case Err::empty_scores: return "EmptyScores";
        case Err::empty_calibration: return "EmptyCalibration";
        case Err::single_class: return "SingleClass";
        case Err::no_positives: return "NoPositives";
        case Err::no_usable_slices: return "NoUsableSlices";
        case Err::single_agent: return "SingleAgent";
        case Err::kind_column_mismatch: return "KindColumnMismatch";
        case Err::malformed_trace: return "MalformedTrace";
        case Err::negative_weight: return "NegativeWeight";
        case Err::not_normalizable: return "NotNormalizable";
        case Err::dimension_mismatch: return "DimensionMismatch";
        case Err::degenerate_train: return "DegenerateTrain";
        case Err::bound_violation: return "BoundViolation";
        case Err::numeric_error: return "NumericError";
    }
    return "MadError";
}

int exit_code_for(Err code) {
    switch (code) {
        case Err::config_error:
            return 2;
        case Err::parse_error:
        case Err::schema_mismatch:
        case Err::insufficient_rows:
        case Err::empty_train:
        case Err::empty_scores:
        case Err::empty_calibration:
        case Err::single_class:
        case Err::no_positives:
        case Err::no_usable_slices:
        case Err::single_agent:
        case Err::kind_column_mismatch:
        case Err::malformed_trace:
            return 3;
        default:
            return 4;
    }
}

const char* split_tag_name(SplitTag tag) {
    switch (tag) {
        case SplitTag::train: return "train";
        case SplitTag::validation: return "validation";
        case SplitTag::calibration: return "calibration";
        case SplitTag::test: return "test";
    }
    return "?";
}

void DatasetTable::validate() const {
    if (values.size() != rows * columns.size())
        raise(Err::schema_mismatch, "cell count does not match rows x columns");
    if (split_tags.size() != rows)
        raise(Err::schema_mismatch, "split tag count does not match rows");
    if (labels && labels->size() != rows)
        raise(Err::schema_mismatch, "label count does not match rows");
    if (labels) {
        for (int8_t y : *labels)
            if (y != 0 && y != 1)
                raise(Err::schema_mismatch, "labels must be 0 or 1");
    }
    for (const ColumnSpec& col : columns) {
        if (col.kind == ColumnKind::categorical && col.categories.empty())
            raise(Err::schema_mismatch, "categorical column '" + col.name + "' has no categories");
    }
}

WeightVector WeightVector::uniform(size_t n) {
    if (n == 0) raise(Err::not_normalizable, "empty weight vector");
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::validated(std::vector<double> w) {
    if (w.empty()) raise(Err::not_normalizable, "empty weight vector");
    double sum = 0.0;
    for (double v : w) {
        if (!std::isfinite(v)) raise(Err::not_normalizable, "non-finite weight");
        if (v < 0.0) raise(Err::negative_weight, "weight below zero");
        sum += v;
    }
    if (std::abs(sum - 1.0) <= kSimplexTol) return WeightVector(std::move(w));
    if (sum <= 0.0 || std::abs(sum - 1.0) > kRenormBand)
        raise(Err::not_normalizable, "weight sum outside tolerance band");
    for (double& v : w) v /= sum;
    return WeightVector(std::move(w));
}

namespace {

void require_trace(bool cond, const std::string& msg) {
    if (!cond) raise(Err::malformed_trace, msg);
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

} // namespace

void validate_trace(const DebateTrace& trace) {
    require_trace(!trace.rounds.empty(), "trace must contain at least one round");
    require_trace(in_unit(trace.final_score), "final_score outside [0,1]");
    const size_t n_agents = trace.rounds.front().messages.size();
    require_trace(n_agents >= 1, "round has no messages");
    for (const RoundRecord& round : trace.rounds) {
        require_trace(round.messages.size() == n_agents, "message count varies across rounds");
        require_trace(round.losses.total.size() == n_agents, "loss length mismatch");
        require_trace(round.losses.pred.size() == n_agents && round.losses.dispute.size() == n_agents &&
                          round.losses.evidence.size() == n_agents,
                      "loss component length mismatch");
        require_trace(round.weights_before.size() == n_agents && round.weights_after.size() == n_agents,
                      "weight length mismatch");
        require_trace(in_unit(round.aggregate_score), "aggregate_score outside [0,1]");
        for (const Message& m : round.messages) {
            require_trace(m.agent_id < n_agents, "agent_id out of range");
            require_trace(in_unit(m.score), "message score outside [0,1]");
            require_trace(in_unit(m.confidence), "message confidence outside [0,1]");
            for (double a : m.evidence.attribution)
                require_trace(std::isfinite(a), "non-finite attribution entry");
        }
        for (double l : round.losses.total) require_trace(in_unit(l), "total loss outside [0,1]");
    }
    const RoundRecord& last = trace.rounds.back();
    double post = 0.0;
    for (size_t i = 0; i < n_agents; ++i) post += last.weights_after[i] * last.messages[i].score;
    const bool matches_post = std::abs(post - trace.final_score) <= kSimplexTol;
    const bool matches_pre = std::abs(last.aggregate_score - trace.final_score) <= kSimplexTol;
    require_trace(matches_post || matches_pre,
                  "final_score inconsistent with last-round weighted score");
}

void MadConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) raise(Err::config_error, "mad.eta must be > 0");
    if (eta > 1.0) log::warn("eta > 1: the regret guarantee assumes eta in (0,1]");
    if (lambda < 0.0 || !std::isfinite(lambda)) raise(Err::config_error, "mad.lambda must be >= 0");
    if (gamma < 0.0 || !std::isfinite(gamma)) raise(Err::config_error, "mad.gamma must be >= 0");
    if (rounds_T < 1) raise(Err::config_error, "mad.rounds must be >= 1");
    if (!(epsilon > 0.0) || epsilon >= 0.5) raise(Err::config_error, "mad.epsilon must be in (0, 0.5)");
    if (perturbation.noise_scale < 0.0) raise(Err::config_error, "mad.perturbation.noise_scale must be >= 0");
    if (perturbation.samples_K < 1) raise(Err::config_error, "mad.perturbation.samples must be >= 1");
}

} // namespace mad
