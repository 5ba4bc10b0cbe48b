#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mad/ingest.hpp"
#include "mad/log.hpp"

namespace mad::ingest {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_real(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + s.size() && !s.empty();
}

} // namespace

DatasetTable load_csv(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) raise(Err::parse_error, "cannot open '" + path + "'");
    return parse_csv(in, options);
}

DatasetTable parse_csv(std::istream& in, const LoadOptions& options) {
    std::string line;
    if (!std::getline(in, line)) raise(Err::parse_error, "missing header row");
    const std::vector<std::string> header = split_fields(line);
    if (header.empty()) raise(Err::parse_error, "empty header row");

    std::optional<size_t> label_col;
    if (options.label_column) {
        for (size_t c = 0; c < header.size(); ++c)
            if (header[c] == *options.label_column) label_col = c;
        if (!label_col)
            raise(Err::schema_mismatch, "label column '" + *options.label_column + "' not in header");
    }

    // raw cells as text, one pass
    std::vector<std::vector<std::string>> raw;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size())
            raise(Err::parse_error, "row " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(header.size()));
        raw.push_back(std::move(fields));
    }

    // column specs: provided schema or inferred (numeric when every non-empty
    // cell parses as a real, categorical otherwise)
    std::vector<size_t> data_cols; // header indices excluding the label column
    for (size_t c = 0; c < header.size(); ++c)
        if (!label_col || c != *label_col) data_cols.push_back(c);

    std::vector<ColumnSpec> columns;
    if (options.schema) {
        columns = *options.schema;
        if (columns.size() != data_cols.size())
            raise(Err::schema_mismatch, "schema has " + std::to_string(columns.size()) +
                                            " columns, file has " + std::to_string(data_cols.size()));
        for (size_t k = 0; k < columns.size(); ++k)
            if (columns[k].name != header[data_cols[k]])
                raise(Err::schema_mismatch, "schema column '" + columns[k].name +
                                                "' does not match header '" + header[data_cols[k]] + "'");
    } else {
        for (size_t k = 0; k < data_cols.size(); ++k) {
            ColumnSpec spec;
            spec.name = header[data_cols[k]];
            spec.kind = ColumnKind::numeric;
            double unused;
            for (const auto& row : raw) {
                const std::string& cell = row[data_cols[k]];
                if (!cell.empty() && !parse_real(cell, unused)) {
                    spec.kind = ColumnKind::categorical;
                    break;
                }
            }
            if (spec.kind == ColumnKind::categorical) {
                // categories interned in first-appearance order
                for (const auto& row : raw) {
                    const std::string& cell = row[data_cols[k]];
                    if (cell.empty()) continue;
                    if (std::find(spec.categories.begin(), spec.categories.end(), cell) ==
                        spec.categories.end())
                        spec.categories.push_back(cell);
                }
                if (spec.categories.empty()) spec.categories.push_back("__empty__");
            }
            columns.push_back(std::move(spec));
        }
    }

    DatasetTable table;
    table.columns = columns;
    table.rows = raw.size();
    table.values.reserve(raw.size() * columns.size());
    table.split_tags.assign(raw.size(), SplitTag::train);
    if (label_col) table.labels = std::vector<int8_t>();

    for (size_t r = 0; r < raw.size(); ++r) {
        for (size_t k = 0; k < data_cols.size(); ++k) {
            const std::string& cell = raw[r][data_cols[k]];
            const ColumnSpec& spec = columns[k];
            if (cell.empty()) {
                table.values.emplace_back(std::nullopt);
                continue;
            }
            if (spec.kind == ColumnKind::numeric) {
                double v;
                if (!parse_real(cell, v))
                    raise(Err::parse_error, "row " + std::to_string(r + 2) + ", column '" + spec.name +
                                                "': cannot parse '" + cell + "' as a real");
                table.values.emplace_back(v);
            } else {
                auto it = std::find(spec.categories.begin(), spec.categories.end(), cell);
                if (it == spec.categories.end())
                    raise(Err::schema_mismatch, "row " + std::to_string(r + 2) + ", column '" + spec.name +
                                                    "': unknown category '" + cell + "'");
                table.values.emplace_back(static_cast<double>(it - spec.categories.begin()));
            }
        }
        if (label_col) {
            const std::string& cell = raw[r][*label_col];
            if (cell != "0" && cell != "1")
                raise(Err::schema_mismatch,
                      "row " + std::to_string(r + 2) + ": label must be 0 or 1, got '" + cell + "'");
            table.labels->push_back(static_cast<int8_t>(cell == "1" ? 1 : 0));
        }
    }
    table.validate();
    return table;
}

std::vector<size_t> rows_with_tag(const DatasetTable& table, SplitTag tag) {
    std::vector<size_t> out;
    for (size_t r = 0; r < table.rows; ++r)
        if (table.split_tags[r] == tag) out.push_back(r);
    return out;
}

DatasetTable subset(const DatasetTable& table, const std::vector<size_t>& row_indices) {
    DatasetTable out;
    out.columns = table.columns;
    out.rows = row_indices.size();
    out.values.reserve(row_indices.size() * table.cols());
    out.split_tags.reserve(row_indices.size());
    if (table.labels) out.labels = std::vector<int8_t>();
    for (size_t r : row_indices) {
        for (size_t c = 0; c < table.cols(); ++c) out.values.push_back(table.at(r, c));
        out.split_tags.push_back(table.split_tags[r]);
        if (table.labels) out.labels->push_back((*table.labels)[r]);
    }
    return out;
}

void write_split_assignment(std::ostream& out, const DatasetTable& table) {
    out << "row_index,split_tag\n";
    for (size_t r = 0; r < table.rows; ++r)
        out << r << ',' << split_tag_name(table.split_tags[r]) << '\n';
}

} // namespace mad::ingest
