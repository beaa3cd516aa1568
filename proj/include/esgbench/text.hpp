#pragma once

// Small text utilities shared by ingestion and report emission: UTF-8
// validation, RFC 4180 style CSV reading/writing and number rendering.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <fmt/format.h>

#include "esgbench/error.hpp"

namespace esgbench::text {

using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

[[nodiscard]] inline bool is_valid_utf8(std::string_view s) noexcept {
    std::size_t i = 0;
    const auto n = s.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += len;
    }
    return true;
}

[[nodiscard]] inline std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

/// Absent or whitespace-only.
[[nodiscard]] inline bool is_blank(const Cell& cell) noexcept {
    return !cell || trim(*cell).empty();
}

/// Parse comma-separated text. Empty unquoted fields become absent cells; a
/// quoted empty field ("") is present but empty. Rows keep their own width.
[[nodiscard]] inline std::vector<Row> parse_csv(std::string_view input) {
    std::vector<Row> rows;
    if (input.size() >= 3 && input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
    if (input.empty()) return rows;

    Row row;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    bool field_started = false;
    auto end_field = [&] {
        if (was_quoted || !field.empty()) {
            row.emplace_back(std::move(field));
        } else {
            row.emplace_back(std::nullopt);
        }
        field.clear();
        was_quoted = false;
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        // a line that is nothing but a line terminator is an empty row
        if (row.size() == 1 && !row.front()) row.clear();
        rows.push_back(std::move(row));
        row.clear();
    };

    std::size_t i = 0;
    while (i < input.size()) {
        const char c = input[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < input.size() && input[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            was_quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            end_row();
            if (c == '\r' && i + 1 < input.size() && input[i + 1] == '\n') ++i;
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (quoted) throw DataError("unterminated quoted field");
    if (field_started || !row.empty()) end_row();
    return rows;
}

[[nodiscard]] inline std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

[[nodiscard]] inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

/// Strict decimal parse: optional sign, digits, optional '.' fraction,
/// optional exponent. No thousands separators, no locale, no hex, no inf/nan.
[[nodiscard]] inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    }
    if (digits == 0) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++exp_digits;
        if (exp_digits == 0) return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;

    std::string_view body = s;
    if (body.front() == '+') body.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

/// Shortest representation that round-trips.
[[nodiscard]] inline std::string shortest(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

/// Fixed-point rendering as used in the human-readable tables.
[[nodiscard]] inline std::string fixed(double x, int decimals) {
    if (std::isnan(x)) return "";
    auto s = fmt::format("{:.{}f}", x, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

/// Round half away from zero on the shortest decimal representation of `x`
/// and render with exactly `decimals` digits, so 6.745 -> "6.75" even though
/// the binary value lies just below the tie.
[[nodiscard]] inline std::string round_half_up(double x, int decimals) {
    if (!std::isfinite(x)) throw DataError("cannot round a non-finite value");
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
    std::string s(buf, r.ptr);
    const bool negative = !s.empty() && s.front() == '-';
    if (negative) s.erase(0, 1);
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        s += '.';
        dot = s.size() - 1;
    }
    std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    const bool round_up = frac.size() > static_cast<std::size_t>(decimals) &&
                          frac[static_cast<std::size_t>(decimals)] >= '5';
    frac.resize(static_cast<std::size_t>(decimals), '0');
    std::string digits = whole + frac;
    if (round_up) {
        int k = static_cast<int>(digits.size()) - 1;
        while (k >= 0) {
            if (digits[static_cast<std::size_t>(k)] == '9') {
                digits[static_cast<std::size_t>(k)] = '0';
                --k;
            } else {
                ++digits[static_cast<std::size_t>(k)];
                break;
            }
        }
        if (k < 0) digits.insert(digits.begin(), '1');
    }
    const auto split = digits.size() - static_cast<std::size_t>(decimals);
    std::string out = digits.substr(0, split);
    if (decimals > 0) out += "." + digits.substr(split);
    const bool is_zero = out.find_first_not_of("0.") == std::string::npos;
    if (negative && !is_zero) out.insert(out.begin(), '-');
    return out;
}

}  // namespace esgbench::text
