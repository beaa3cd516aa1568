#pragma once

// Survey sheet ingestion: one comma-separated export per workbook sheet,
// cleaned into a criteria x country frequency table.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "esgbench/error.hpp"
#include "esgbench/text.hpp"

namespace esgbench::ingest {

namespace fs = std::filesystem;

/// Rows of leading metadata dropped from every sheet unless the manifest
/// overrides it.
inline constexpr std::size_t kDefaultSkipRows = 10;

struct RawSheet {
    std::string sheet_id;
    std::vector<text::Row> rows;
};

struct CleanTable {
    std::string sheet_id;
    text::Cell criteria_header;
    std::vector<std::string> criteria;         // one per data row, forward-filled
    std::vector<std::string> country_columns;  // standardized codes
    std::vector<std::vector<double>> values;   // criteria.size() x country_columns.size()

    friend bool operator==(const CleanTable&, const CleanTable&) = default;
};

/// Where a sheet comes from and how many metadata rows precede its header.
struct SheetSource {
    fs::path file;
    std::string sheet_id;
    std::size_t skip_rows = kDefaultSkipRows;
};

/// Upper-cased, trimmed, with inner blanks and dashes folded to '_'.
[[nodiscard]] inline std::string standardize_code(std::string_view code) {
    std::string out;
    for (char c : text::trim(code)) {
        if (c == ' ' || c == '-' || c == '\t') {
            out.push_back('_');
        } else if (c >= 'a' && c <= 'z') {
            out.push_back(static_cast<char>(c - 'a' + 'A'));
        } else {
            out.push_back(c);
        }
    }
    return out;
}

/// The sheet list of a directory. A `sheets.json` manifest, when present,
/// is authoritative; otherwise every `*.csv` file in lexicographic order.
[[nodiscard]] inline std::vector<SheetSource> list_sheets(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw DataError("sheet directory not found: " + dir.string());
    }
    std::vector<SheetSource> out;
    const auto manifest = dir / "sheets.json";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest, std::ios::binary);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed sheet manifest " + manifest.string() + ": " + e.what());
        }
        if (!j.contains("sheets") || !j["sheets"].is_array()) {
            throw DataError("sheet manifest " + manifest.string() + " lacks a \"sheets\" array");
        }
        for (const auto& entry : j["sheets"]) {
            SheetSource src;
            if (entry.is_string()) {
                src.sheet_id = entry.get<std::string>();
                src.file = dir / (src.sheet_id + ".csv");
            } else if (entry.is_object() && entry.contains("id")) {
                src.sheet_id = entry["id"].get<std::string>();
                src.file = dir / entry.value("file", src.sheet_id + ".csv");
                src.skip_rows = entry.value("skip_rows", kDefaultSkipRows);
            } else {
                throw DataError("invalid sheet manifest entry: " + entry.dump());
            }
            out.push_back(std::move(src));
        }
        return out;
    }
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
        out.push_back({e.path(), e.path().stem().string(), kDefaultSkipRows});
    }
    std::sort(out.begin(), out.end(),
              [](const SheetSource& a, const SheetSource& b) { return a.sheet_id < b.sheet_id; });
    return out;
}

[[nodiscard]] inline RawSheet read_sheet(const SheetSource& src) {
    std::ifstream in(src.file, std::ios::binary);
    if (!in) throw DataError("cannot read sheet file: " + src.file.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw DataError("cannot read sheet file: " + src.file.string());
    if (content.empty()) throw DataError("empty sheet file: " + src.file.string());
    if (!text::is_valid_utf8(content)) {
        throw DataError("encoding error: " + src.file.string() + " is not valid UTF-8");
    }
    try {
        return {src.sheet_id, text::parse_csv(content)};
    } catch (const DataError& e) {
        throw DataError(src.file.string() + ": " + e.what());
    }
}

[[nodiscard]] inline std::vector<RawSheet> load_sheet_dir(const fs::path& dir) {
    std::vector<RawSheet> out;
    for (const auto& src : list_sheets(dir)) out.push_back(read_sheet(src));
    return out;
}

/// Replace each absent entry with the nearest non-absent entry above it.
[[nodiscard]] inline std::vector<std::string> forward_fill_criteria(
    const std::vector<text::Cell>& column) {
    std::vector<std::string> out;
    out.reserve(column.size());
    for (const auto& cell : column) {
        if (!text::is_blank(cell)) {
            out.emplace_back(text::trim(*cell));
        } else if (out.empty()) {
            throw DataError("unanchored criteria column");
        } else {
            out.push_back(out.back());
        }
    }
    return out;
}

/// True when the trimmed text is one parenthesized group with nothing
/// outside it, e.g. "(QA5 identifiers)" but not "(a) or (b)".
[[nodiscard]] inline bool is_parenthesized_only(std::string_view s) {
    s = text::trim(s);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') --depth;
        if (depth == 0 && i + 1 != s.size()) return false;
    }
    return depth == 0;
}

/// Drop leading metadata rows, fully blank rows and columns, and rows whose
/// criteria cell is only a parenthesized identifier; the first surviving row
/// is the country header. Absent frequency cells in a data row read as 0;
/// rows with no frequency at all are dropped after forward-fill.
[[nodiscard]] inline CleanTable clean_sheet(const RawSheet& raw,
                                            std::size_t skip_rows = kDefaultSkipRows) {
    const auto& id = raw.sheet_id;
    if (raw.rows.size() <= skip_rows) throw DataError("sheet too short: " + id);

    std::vector<text::Row> rows(raw.rows.begin() + static_cast<std::ptrdiff_t>(skip_rows),
                                raw.rows.end());
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.size());
    for (auto& r : rows) r.resize(width);

    std::erase_if(rows, [](const text::Row& r) {
        return std::all_of(r.begin(), r.end(), [](const text::Cell& c) { return text::is_blank(c); });
    });
    std::vector<std::size_t> keep_cols;
    for (std::size_t c = 0; c < width; ++c) {
        const bool any = std::any_of(rows.begin(), rows.end(),
                                     [c](const text::Row& r) { return !text::is_blank(r[c]); });
        if (any) keep_cols.push_back(c);
    }
    if (rows.size() < 2 || keep_cols.size() < 2) throw DataError("empty after cleaning: " + id);

    for (auto& r : rows) {
        text::Row narrowed;
        narrowed.reserve(keep_cols.size());
        for (auto c : keep_cols) narrowed.push_back(std::move(r[c]));
        r = std::move(narrowed);
    }

    CleanTable out;
    out.sheet_id = id;
    const auto& header = rows.front();
    if (!text::is_blank(header[0])) out.criteria_header = std::string(text::trim(*header[0]));
    std::set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (text::is_blank(header[c])) {
            throw DataError("missing country code in column " + std::to_string(keep_cols[c] + 1) +
                            " of sheet " + id);
        }
        auto code = standardize_code(*header[c]);
        if (!seen.insert(code).second) {
            throw DataError("duplicate country code " + code + " in sheet " + id);
        }
        out.country_columns.push_back(std::move(code));
    }

    std::vector<text::Row> data;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& crit = rows[r][0];
        if (crit && is_parenthesized_only(*crit)) continue;
        data.push_back(std::move(rows[r]));
    }
    if (data.empty()) throw DataError("empty after cleaning: " + id);

    std::vector<text::Cell> crit_col;
    crit_col.reserve(data.size());
    for (const auto& r : data) crit_col.push_back(r[0]);
    std::vector<std::string> filled;
    try {
        filled = forward_fill_criteria(crit_col);
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " in sheet " + id);
    }

    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto& row = data[r];
        const bool has_numbers = std::any_of(row.begin() + 1, row.end(),
                                             [](const text::Cell& c) { return !text::is_blank(c); });
        if (!has_numbers) continue;
        std::vector<double> vals;
        vals.reserve(out.country_columns.size());
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (text::is_blank(row[c])) {
                vals.push_back(0.0);
                continue;
            }
            const auto v = text::parse_number(*row[c]);
            if (!v || *v < 0.0) {
                throw DataError("non-numeric or negative frequency '" + *row[c] + "' in sheet " + id +
                                ", criteria '" + filled[r] + "', country " +
                                out.country_columns[c - 1]);
            }
            vals.push_back(*v);
        }
        out.criteria.push_back(filled[r]);
        out.values.push_back(std::move(vals));
    }
    if (out.criteria.empty()) throw DataError("empty after cleaning: " + id);
    return out;
}

}  // namespace esgbench::ingest
