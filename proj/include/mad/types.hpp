#pragma once
// Shared domain types and numeric conventions. Values are immutable after
// construction; mutation happens by building new values.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mad/error.hpp"

namespace mad {

inline constexpr double kSimplexTol = 1e-9;
inline constexpr double kRenormBand = 1e-6;
inline constexpr double kStdFloor = 1e-12;

// ---------------------------------------------------------------------------
// tabular data

enum class SplitTag : uint8_t { train = 0, validation = 1, calibration = 2, test = 3 };

const char* split_tag_name(SplitTag tag);

enum class ColumnKind : uint8_t { numeric, categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> categories; // categorical only, >= 1 entry

    bool operator==(const ColumnSpec&) const = default;
};

// A cell is either a real (numeric column) or a category index (categorical
// column); missing is represented explicitly, never by a sentinel value.
using Cell = std::optional<double>;

struct DatasetTable {
    std::vector<ColumnSpec> columns;
    std::vector<Cell> values; // row-major, rows * columns.size()
    std::optional<std::vector<int8_t>> labels; // 0 = normal, 1 = anomaly
    std::vector<SplitTag> split_tags;
    size_t rows = 0;

    size_t cols() const { return columns.size(); }
    Cell& at(size_t r, size_t c) { return values[r * columns.size() + c]; }
    const Cell& at(size_t r, size_t c) const { return values[r * columns.size() + c]; }

    // enforces the row/label/tag invariants; raises schema_mismatch
    void validate() const;
};

// dense row-major real matrix (preprocessed feature space)
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(size_t i) { return data.data() + i * cols; }
    std::span<const double> row(size_t i) const { return {data.data() + i * cols, cols}; }
    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

// ---------------------------------------------------------------------------
// debate messages

struct Evidence {
    std::vector<double> attribution;                // length d, may be all-zero
    std::optional<std::vector<double>> counterfactual; // carried, unused by default synthesis
    std::optional<std::string> rationale;           // opaque text

    bool operator==(const Evidence&) const = default;
};

struct Message {
    size_t agent_id = 0;
    double score = 0.0;      // normalized, in [0,1]
    double confidence = 0.0; // in [0,1]
    Evidence evidence;

    bool operator==(const Message&) const = default;
};

// point on the N-simplex; construct through validated()/uniform()
class WeightVector {
public:
    static WeightVector uniform(size_t n);
    // accepts when nonnegative and sum within 1e-9 of 1; renormalizes when the
    // sum is within 1e-6; raises negative_weight / not_normalizable otherwise
    static WeightVector validated(std::vector<double> w);

    const std::vector<double>& values() const { return w_; }
    double operator[](size_t i) const { return w_[i]; }
    size_t size() const { return w_.size(); }

    bool operator==(const WeightVector&) const = default;

private:
    explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {}
    std::vector<double> w_;
};

inline WeightVector validate_weight_vector(std::vector<double> w) {
    return WeightVector::validated(std::move(w));
}

// bounded per-agent loss vector with its pre-clip component breakdown
struct SynthesizedLoss {
    std::vector<double> total;    // in [0,1] each
    std::vector<double> pred;
    std::vector<double> dispute;
    std::vector<double> evidence;

    size_t size() const { return total.size(); }
    bool operator==(const SynthesizedLoss&) const = default;
};

struct CoordinatorState {
    int round = 1; // in [1, T+1]
    WeightVector weights = WeightVector::uniform(1);
};

// ---------------------------------------------------------------------------
// trace

struct RoundRecord {
    std::vector<Message> messages;
    SynthesizedLoss losses;
    WeightVector weights_before = WeightVector::uniform(1);
    WeightVector weights_after = WeightVector::uniform(1);
    double aggregate_score = 0.0; // pre-update aggregate of this round

    bool operator==(const RoundRecord&) const = default;
};

struct DebateTrace {
    std::string input_id;
    std::vector<RoundRecord> rounds;
    double final_score = 0.0;
    std::string config_digest;

    bool operator==(const DebateTrace&) const = default;
};

// Checks trace invariants: rounds nonempty, per-round shapes consistent,
// scores/losses in range, and final_score equal within 1e-9 to the last
// round's post-update weighted score (default weight mode) or, for traces
// produced under final_weights=pre, to its pre-update aggregate. Raises
// malformed_trace.
void validate_trace(const DebateTrace& trace);

// ---------------------------------------------------------------------------
// run configuration

struct PerturbationSpec {
    double noise_scale = 0.05; // fraction of per-feature train std
    int samples_K = 8;
};

enum class FinalWeights : uint8_t { post, pre };

struct MadConfig {
    double eta = 0.5;     // EG step, regret guarantee assumes (0,1]
    double lambda = 0.25; // dispute weight
    double gamma = 0.25;  // evidence weight
    int rounds_T = 1;
    double epsilon = 1e-6; // log guard for the supervised loss
    PerturbationSpec perturbation;
    bool supervised = false;
    uint64_t seed = 42;
    FinalWeights final_weights = FinalWeights::post;

    // raises config_error on invalid fields; warns when eta is outside (0,1]
    void validate() const;
};

} // namespace mad
