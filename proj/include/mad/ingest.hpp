#pragma once
// Dataset intake: CSV loading, leakage-free preprocessing fit on the train
// split only, seeded splitting, the test-time corruption suite, and slice
// construction for the gap metric.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mad/types.hpp"

namespace mad::ingest {

// ---------------------------------------------------------------------------
// loading

struct LoadOptions {
    std::optional<std::string> label_column;          // parsed as {0,1} labels
    std::optional<std::vector<ColumnSpec>> schema;    // inferred when absent
};

DatasetTable load_csv(const std::string& path, const LoadOptions& options = {});
DatasetTable parse_csv(std::istream& in, const LoadOptions& options = {});

std::vector<size_t> rows_with_tag(const DatasetTable& table, SplitTag tag);
DatasetTable subset(const DatasetTable& table, const std::vector<size_t>& row_indices);

// ---------------------------------------------------------------------------
// preprocessing

struct NumericColumnStats {
    double mean = 0.0;
    double std_dev = kStdFloor; // population std, floored at 1e-12
    double median = 0.0;
};

struct CategoricalColumnStats {
    size_t mode = 0; // index into ColumnSpec::categories
};

struct PreprocessModel {
    std::vector<ColumnSpec> columns;
    std::vector<NumericColumnStats> numeric;          // slot per column, used when numeric
    std::vector<CategoricalColumnStats> categorical;  // slot per column, used when categorical
    bool add_missing_indicators = true;

    // encoded width: 1 per numeric column, categories+1 (unknown bucket) per
    // categorical column, plus one indicator per column when enabled
    size_t feature_dim() const;
    std::vector<std::string> feature_names() const;
};

// statistics come from the given view only (callers pass the train split)
PreprocessModel fit_preprocess(const DatasetTable& train_view, bool add_missing_indicators = true);

// median/mode imputation, standardization, one-hot with unknown bucket,
// missingness indicators appended when enabled
Matrix apply_preprocess(const PreprocessModel& model, const DatasetTable& view);

// ---------------------------------------------------------------------------
// splits

struct SplitFractions {
    double train = 0.6;
    double validation = 0.1;
    double calibration = 0.1;
    double test = 0.2;
};

// Seeded shuffle + partition; with stratification the anomaly rate is
// preserved per split within rounding. Anomalies landing in the calibration
// split are reassigned to train so calibration holds normals only.
DatasetTable split(const DatasetTable& dataset, const SplitFractions& fractions, uint64_t seed,
                   bool stratify_on_labels);

void write_split_assignment(std::ostream& out, const DatasetTable& table);

// ---------------------------------------------------------------------------
// corruption suite (test-time only, by caller contract)

enum class CorruptionKind : uint8_t {
    gaussian_noise,
    missing_injection,
    scaling_drift,
    categorical_perturbation,
};

const char* corruption_kind_name(CorruptionKind kind);
std::optional<CorruptionKind> corruption_kind_from_name(const std::string& name);

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::gaussian_noise;
    double severity = 0.0; // in [0,1]
    std::optional<std::vector<std::string>> target_columns; // all applicable when absent
    uint64_t seed = 0;
};

// Gaussian noise scale and drift act on raw (pre-standardization) values;
// train statistics come from the fitted preprocess model.
DatasetTable corrupt(const DatasetTable& view, const CorruptionSpec& spec, const PreprocessModel& model);

// ---------------------------------------------------------------------------
// slices

enum class SliceKind : uint8_t { missingness_pattern, feature_quantile, label_free_custom };

struct SliceSpec {
    std::string name;
    SliceKind kind = SliceKind::feature_quantile;
    std::string column;  // feature_quantile only
    int bin_count = 4;   // feature_quantile only
    std::vector<std::vector<size_t>> custom_rows; // label_free_custom: indices into test rows
};

struct Slice {
    std::string name;
    std::vector<size_t> rows; // indices into the test-row ordering of the table
};

// Quantile edges are fit on train rows; slices below 10 rows are merged into a
// neighbor with a warning.
std::vector<Slice> make_slices(const DatasetTable& table, const SliceSpec& spec);

} // namespace mad::ingest
