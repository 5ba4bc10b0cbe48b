#include <algorithm>
#include <map>

#include "mad/ingest.hpp"
#include "mad/log.hpp"

namespace mad::ingest {

namespace {

constexpr size_t kSliceFloor = 10;
constexpr size_t kMaxPatterns = 8;

size_t column_index(const DatasetTable& table, const std::string& name) {
    for (size_t c = 0; c < table.cols(); ++c)
        if (table.columns[c].name == name) return c;
    raise(Err::config_error, "slice column '" + name + "' not found");
}

// ordered slices (quantile bins): merge any undersized slice into the
// previous bin, cascading left to right
std::vector<Slice> merge_small_ordered(std::vector<Slice> slices) {
    bool merged_any = true;
    while (merged_any && slices.size() > 1) {
        merged_any = false;
        for (size_t i = 0; i < slices.size(); ++i) {
            if (slices[i].rows.size() >= kSliceFloor) continue;
            const size_t into = i > 0 ? i - 1 : 1;
            log::warn("slice '" + slices[i].name + "' has " + std::to_string(slices[i].rows.size()) +
                      " rows (< " + std::to_string(kSliceFloor) + "); merging into '" +
                      slices[into].name + "'");
            slices[into].rows.insert(slices[into].rows.end(), slices[i].rows.begin(),
                                     slices[i].rows.end());
            slices[into].name += "+" + slices[i].name;
            slices.erase(slices.begin() + static_cast<long>(i));
            merged_any = true;
            break;
        }
    }
    for (Slice& s : slices) std::sort(s.rows.begin(), s.rows.end());
    return slices;
}

} // namespace

std::vector<Slice> make_slices(const DatasetTable& table, const SliceSpec& spec) {
    const std::vector<size_t> test_rows = rows_with_tag(table, SplitTag::test);
    if (test_rows.empty()) raise(Err::insufficient_rows, "no test rows to slice");

    switch (spec.kind) {
        case SliceKind::feature_quantile: {
            const size_t c = column_index(table, spec.column);
            if (table.columns[c].kind != ColumnKind::numeric)
                raise(Err::config_error, "quantile slicing needs a numeric column");
            if (spec.bin_count < 2) raise(Err::config_error, "quantile slicing needs >= 2 bins");

            // bin edges fit on train rows; fall back to the test rows when the
            // table carries no train split (standalone slicing)
            std::vector<double> fit_values;
            for (size_t r : rows_with_tag(table, SplitTag::train))
                if (table.at(r, c)) fit_values.push_back(*table.at(r, c));
            if (fit_values.empty()) {
                log::debug("no train rows for quantile edges; fitting on the sliced rows");
                for (size_t r : test_rows)
                    if (table.at(r, c)) fit_values.push_back(*table.at(r, c));
            }
            if (fit_values.empty()) raise(Err::config_error, "quantile column is entirely missing");
            std::sort(fit_values.begin(), fit_values.end());

            const size_t bins = static_cast<size_t>(spec.bin_count);
            std::vector<double> edges;
            for (size_t k = 1; k < bins; ++k)
                edges.push_back(fit_values[std::min(fit_values.size() - 1,
                                                    k * fit_values.size() / bins)]);

            std::vector<Slice> slices(bins);
            for (size_t b = 0; b < bins; ++b)
                slices[b].name = spec.name + "_q" + std::to_string(b);
            Slice missing_slice{spec.name + "_missing", {}};
            for (size_t i = 0; i < test_rows.size(); ++i) {
                const Cell& cell = table.at(test_rows[i], c);
                if (!cell) {
                    missing_slice.rows.push_back(i);
                    continue;
                }
                size_t b = 0;
                while (b < edges.size() && *cell >= edges[b]) ++b;
                slices[b].rows.push_back(i);
            }
            if (!missing_slice.rows.empty()) slices.push_back(std::move(missing_slice));
            return merge_small_ordered(std::move(slices));
        }

        case SliceKind::missingness_pattern: {
            std::map<std::string, std::vector<size_t>> groups;
            for (size_t i = 0; i < test_rows.size(); ++i) {
                std::string sig(table.cols(), '0');
                for (size_t c = 0; c < table.cols(); ++c)
                    if (!table.at(test_rows[i], c)) sig[c] = '1';
                groups[sig].push_back(i);
            }
            // keep the 8 most frequent patterns, everything else lands in "other"
            std::vector<std::pair<std::string, std::vector<size_t>>> ordered(groups.begin(),
                                                                             groups.end());
            std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
                if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
                return a.first < b.first;
            });
            std::vector<Slice> slices;
            Slice other{spec.name + "_other", {}};
            for (size_t k = 0; k < ordered.size(); ++k) {
                if (k < kMaxPatterns && ordered[k].second.size() >= kSliceFloor) {
                    slices.push_back({spec.name + "_" + ordered[k].first, ordered[k].second});
                } else {
                    if (ordered[k].second.size() < kSliceFloor && k < kMaxPatterns &&
                        ordered.size() > 1)
                        log::warn("pattern slice '" + ordered[k].first + "' below " +
                                  std::to_string(kSliceFloor) + " rows; folded into other");
                    other.rows.insert(other.rows.end(), ordered[k].second.begin(),
                                      ordered[k].second.end());
                }
            }
            if (!other.rows.empty()) {
                std::sort(other.rows.begin(), other.rows.end());
                slices.push_back(std::move(other));
            }
            if (slices.empty()) slices.push_back({spec.name + "_all", {}});
            return slices;
        }

        case SliceKind::label_free_custom: {
            std::vector<Slice> slices;
            for (size_t k = 0; k < spec.custom_rows.size(); ++k) {
                for (size_t idx : spec.custom_rows[k])
                    if (idx >= test_rows.size())
                        raise(Err::config_error, "custom slice index out of test-row range");
                slices.push_back({spec.name + "_" + std::to_string(k), spec.custom_rows[k]});
            }
            if (slices.empty()) raise(Err::config_error, "custom slice spec has no row sets");
            return slices;
        }
    }
    raise(Err::config_error, "unknown slice kind");
}

} // namespace mad::ingest
