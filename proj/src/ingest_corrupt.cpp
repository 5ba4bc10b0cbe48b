#include <algorithm>
#include <cmath>

#include "mad/ingest.hpp"
#include "mad/rng.hpp"

namespace mad::ingest {

const char* corruption_kind_name(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::gaussian_noise: return "gaussian_noise";
        case CorruptionKind::missing_injection: return "missing_injection";
        case CorruptionKind::scaling_drift: return "scaling_drift";
        case CorruptionKind::categorical_perturbation: return "categorical_perturbation";
    }
    return "?";
}

std::optional<CorruptionKind> corruption_kind_from_name(const std::string& name) {
    if (name == "gaussian_noise") return CorruptionKind::gaussian_noise;
    if (name == "missing_injection") return CorruptionKind::missing_injection;
    if (name == "scaling_drift") return CorruptionKind::scaling_drift;
    if (name == "categorical_perturbation") return CorruptionKind::categorical_perturbation;
    return std::nullopt;
}

namespace {

// Explicitly named targets must match the kind; bare "all" silently narrows
// to applicable columns.
std::vector<size_t> resolve_targets(const DatasetTable& view, const CorruptionSpec& spec,
                                    bool wants_numeric) {
    std::vector<size_t> targets;
    if (spec.target_columns) {
        for (const std::string& name : *spec.target_columns) {
            bool found = false;
            for (size_t c = 0; c < view.cols(); ++c) {
                if (view.columns[c].name != name) continue;
                found = true;
                const bool is_numeric = view.columns[c].kind == ColumnKind::numeric;
                if (is_numeric != wants_numeric)
                    raise(Err::kind_column_mismatch,
                          std::string(corruption_kind_name(spec.kind)) + " cannot target " +
                              (is_numeric ? "numeric" : "categorical") + " column '" + name + "'");
                targets.push_back(c);
            }
            if (!found) raise(Err::kind_column_mismatch, "unknown target column '" + name + "'");
        }
    } else {
        for (size_t c = 0; c < view.cols(); ++c)
            if ((view.columns[c].kind == ColumnKind::numeric) == wants_numeric) targets.push_back(c);
    }
    return targets;
}

std::vector<size_t> resolve_any_targets(const DatasetTable& view, const CorruptionSpec& spec) {
    std::vector<size_t> targets;
    if (spec.target_columns) {
        for (const std::string& name : *spec.target_columns) {
            bool found = false;
            for (size_t c = 0; c < view.cols(); ++c)
                if (view.columns[c].name == name) {
                    targets.push_back(c);
                    found = true;
                }
            if (!found) raise(Err::kind_column_mismatch, "unknown target column '" + name + "'");
        }
    } else {
        for (size_t c = 0; c < view.cols(); ++c) targets.push_back(c);
    }
    return targets;
}

} // namespace

DatasetTable corrupt(const DatasetTable& view, const CorruptionSpec& spec,
                     const PreprocessModel& model) {
    if (spec.severity < 0.0 || spec.severity > 1.0)
        raise(Err::config_error, "corruption severity must be in [0,1]");
    if (view.columns != model.columns)
        raise(Err::schema_mismatch, "view columns do not match the preprocessing model");

    DatasetTable out = view;
    if (spec.severity == 0.0) return out; // identity, bit-exact

    StreamRng rng =
        StreamRng(spec.seed).stream("corrupt").stream(corruption_kind_name(spec.kind));

    switch (spec.kind) {
        case CorruptionKind::gaussian_noise: {
            const std::vector<size_t> targets = resolve_targets(view, spec, /*wants_numeric=*/true);
            for (size_t c : targets) {
                const double scale = spec.severity * model.numeric[c].std_dev;
                StreamRng col_rng = rng.stream(c);
                for (size_t r = 0; r < out.rows; ++r) {
                    const double noise = col_rng.normal() * scale;
                    if (out.at(r, c)) out.at(r, c) = *out.at(r, c) + noise;
                }
            }
            break;
        }
        case CorruptionKind::missing_injection: {
            const std::vector<size_t> targets = resolve_any_targets(view, spec);
            for (size_t c : targets) {
                StreamRng col_rng = rng.stream(c);
                for (size_t r = 0; r < out.rows; ++r)
                    if (col_rng.uniform01() < spec.severity) out.at(r, c) = std::nullopt;
            }
            break;
        }
        case CorruptionKind::scaling_drift: {
            const std::vector<size_t> targets = resolve_targets(view, spec, /*wants_numeric=*/true);
            const double factor = 1.0 + spec.severity;
            for (size_t c : targets)
                for (size_t r = 0; r < out.rows; ++r)
                    if (out.at(r, c)) out.at(r, c) = *out.at(r, c) * factor;
            break;
        }
        case CorruptionKind::categorical_perturbation: {
            const std::vector<size_t> targets = resolve_targets(view, spec, /*wants_numeric=*/false);
            for (size_t c : targets) {
                // reroute to the unknown bucket: index == categories.size()
                const double unknown = static_cast<double>(view.columns[c].categories.size());
                StreamRng col_rng = rng.stream(c);
                for (size_t r = 0; r < out.rows; ++r) {
                    const bool hit = col_rng.uniform01() < spec.severity;
                    if (hit && out.at(r, c)) out.at(r, c) = unknown;
                }
            }
            break;
        }
    }
    return out;
}

} // namespace mad::ingest
