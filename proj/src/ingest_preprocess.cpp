#include <algorithm>
#include <cmath>

#include "mad/ingest.hpp"
#include "mad/log.hpp"

namespace mad::ingest {

size_t PreprocessModel::feature_dim() const {
    size_t dim = 0;
    for (const ColumnSpec& col : columns)
        dim += col.kind == ColumnKind::numeric ? 1 : col.categories.size() + 1;
    if (add_missing_indicators) dim += columns.size();
    return dim;
}

std::vector<std::string> PreprocessModel::feature_names() const {
    std::vector<std::string> names;
    for (const ColumnSpec& col : columns) {
        if (col.kind == ColumnKind::numeric) {
            names.push_back(col.name);
        } else {
            for (const std::string& cat : col.categories) names.push_back(col.name + "=" + cat);
            names.push_back(col.name + "=__unknown__");
        }
    }
    if (add_missing_indicators)
        for (const ColumnSpec& col : columns) names.push_back(col.name + "__missing");
    return names;
}

PreprocessModel fit_preprocess(const DatasetTable& train_view, bool add_missing_indicators) {
    if (train_view.rows == 0) raise(Err::empty_train, "cannot fit preprocessing on an empty train view");

    PreprocessModel model;
    model.columns = train_view.columns;
    model.add_missing_indicators = add_missing_indicators;
    model.numeric.resize(train_view.cols());
    model.categorical.resize(train_view.cols());

    for (size_t c = 0; c < train_view.cols(); ++c) {
        const ColumnSpec& col = train_view.columns[c];
        if (col.kind == ColumnKind::numeric) {
            std::vector<double> present;
            present.reserve(train_view.rows);
            for (size_t r = 0; r < train_view.rows; ++r)
                if (train_view.at(r, c)) present.push_back(*train_view.at(r, c));
            NumericColumnStats stats;
            if (present.empty()) {
                log::warn("column '" + col.name + "' is all-missing in train; using zero statistics");
                stats = {0.0, kStdFloor, 0.0};
            } else {
                double sum = 0.0;
                for (double v : present) sum += v;
                stats.mean = sum / static_cast<double>(present.size());
                double ss = 0.0;
                for (double v : present) ss += (v - stats.mean) * (v - stats.mean);
                stats.std_dev = std::max(std::sqrt(ss / static_cast<double>(present.size())), kStdFloor);
                std::sort(present.begin(), present.end());
                const size_t n = present.size();
                stats.median = n % 2 == 1 ? present[n / 2] : 0.5 * (present[n / 2 - 1] + present[n / 2]);
            }
            model.numeric[c] = stats;
        } else {
            std::vector<size_t> counts(col.categories.size(), 0);
            for (size_t r = 0; r < train_view.rows; ++r) {
                const Cell& cell = train_view.at(r, c);
                if (!cell) continue;
                const auto idx = static_cast<size_t>(*cell);
                if (idx < counts.size()) ++counts[idx];
            }
            const auto it = std::max_element(counts.begin(), counts.end());
            model.categorical[c].mode =
                counts.empty() ? 0 : static_cast<size_t>(it - counts.begin());
        }
    }
    return model;
}

Matrix apply_preprocess(const PreprocessModel& model, const DatasetTable& view) {
    if (view.columns != model.columns)
        raise(Err::schema_mismatch, "view columns do not match the fitted preprocessing model");

    Matrix out(view.rows, model.feature_dim());
    const size_t n_cols = view.cols();
    const size_t indicator_base = model.feature_dim() - (model.add_missing_indicators ? n_cols : 0);

    for (size_t r = 0; r < view.rows; ++r) {
        double* dst = out.row(r);
        size_t f = 0;
        for (size_t c = 0; c < n_cols; ++c) {
            const ColumnSpec& col = model.columns[c];
            const Cell& cell = view.at(r, c);
            if (col.kind == ColumnKind::numeric) {
                const NumericColumnStats& st = model.numeric[c];
                const double raw = cell ? *cell : st.median;
                dst[f++] = (raw - st.mean) / st.std_dev;
            } else {
                const size_t n_cat = col.categories.size();
                size_t hot;
                if (!cell) {
                    hot = model.categorical[c].mode; // impute mode
                } else {
                    const auto idx = static_cast<size_t>(*cell);
                    hot = idx < n_cat ? idx : n_cat; // out-of-table index lands in the unknown bucket
                }
                for (size_t k = 0; k <= n_cat; ++k) dst[f + k] = k == hot ? 1.0 : 0.0;
                f += n_cat + 1;
            }
            if (model.add_missing_indicators) dst[indicator_base + c] = cell ? 0.0 : 1.0;
        }
    }
    return out;
}

} // namespace mad::ingest
