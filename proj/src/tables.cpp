#include "dsrisk/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "dsrisk/error.hpp"
#include "fixtures.hpp"
#include "text_util.hpp"

namespace dsrisk::tables {
namespace {

bool strictly_increasing(std::span<const double> axis) {
    return std::adjacent_find(axis.begin(), axis.end(), std::greater_equal<>()) == axis.end();
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// A printed table value: digits, optionally '.' and one or two digits.
bool is_printed_decimal(std::string_view s) {
    const auto dot = s.find('.');
    const auto whole = s.substr(0, dot);
    if (!all_digits(whole)) {
        return false;
    }
    if (dot == std::string_view::npos) {
        return true;
    }
    const auto frac = s.substr(dot + 1);
    return frac.size() <= 2 && all_digits(frac);
}

bool same_axis(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](double x, double y) { return std::abs(x - y) <= 1e-12; });
}

}  // namespace

std::vector<double> default_r_axis() {
    std::vector<double> axis;
    for (int i = 1; i <= 35; ++i) {
        axis.push_back(i / 10.0);
    }
    return axis;
}

std::vector<double> default_q_axis() {
    std::vector<double> axis;
    for (int j = 1; j <= 13; ++j) {
        axis.push_back(2 * j / 100.0);
    }
    return axis;
}

TableGrid::TableGrid(Confirmations z, std::vector<double> r_axis, std::vector<double> q_axis,
                     std::vector<double> cells)
    : z_(z), r_axis_(std::move(r_axis)), q_axis_(std::move(q_axis)), cells_(std::move(cells)) {
    if (cells_.size() != r_axis_.size() * q_axis_.size()) {
        throw StructuralError("table cell count does not match its axes");
    }
}

TableGrid generate_table(Confirmations z, std::span<const double> q_axis,
                         std::span<const double> r_axis) {
    if (q_axis.empty() || r_axis.empty()) {
        throw DomainError("table axes must be non-empty");
    }
    if (!strictly_increasing(q_axis) || !strictly_increasing(r_axis)) {
        throw DomainError("table axes must be strictly increasing");
    }
    std::vector<HashrateShare> shares;
    shares.reserve(q_axis.size());
    for (double q : q_axis) {
        shares.emplace_back(q);
    }
    std::vector<double> cells;
    cells.reserve(r_axis.size() * q_axis.size());
    for (double r : r_axis) {
        for (const auto& share : shares) {
            cells.push_back(100.0 * table_probability(z, share, r));
        }
    }
    return TableGrid(z, {r_axis.begin(), r_axis.end()}, {q_axis.begin(), q_axis.end()},
                     std::move(cells));
}

TableGrid generate_table(Confirmations z) {
    return generate_table(z, default_q_axis(), default_r_axis());
}

std::string format_cell(double value_percent) {
    if (!std::isfinite(value_percent)) {
        throw DomainError("format_cell: value must be finite");
    }
    // std::round rounds half away from zero.
    const long long hundredths = std::llround(value_percent * 100.0);
    if (hundredths == 0) {
        return "0";
    }
    const long long magnitude = hundredths < 0 ? -hundredths : hundredths;
    std::string out = hundredths < 0 ? "-" : "";
    out += std::to_string(magnitude / 100);
    const long long frac = magnitude % 100;
    if (frac != 0) {
        out += '.';
        out += static_cast<char>('0' + frac / 10);
        if (frac % 10 != 0) {
            out += static_cast<char>('0' + frac % 10);
        }
    }
    return out;
}

std::string format_axis(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.10g", value);
    return buffer;
}

PublishedFixture::PublishedFixture(Confirmations z, std::vector<std::string> cells)
    : z_(z), cells_(std::move(cells)) {
    if (cells_.size() != kRows * kCols) {
        throw StructuralError("fixture must hold 35 x 13 cells");
    }
}

PublishedFixture parse_fixture(std::string_view text, Confirmations z) {
    const auto lines = detail::split_lines(text);
    if (lines.size() != PublishedFixture::kRows) {
        throw DataError("fixture z=" + std::to_string(z.value()) + " has " +
                        std::to_string(lines.size()) + " lines, expected 35");
    }
    std::vector<std::string> cells;
    cells.reserve(PublishedFixture::kRows * PublishedFixture::kCols);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tokens = detail::split_whitespace(lines[i]);
        if (tokens.size() != PublishedFixture::kCols) {
            throw DataError("expected 13 values, found " + std::to_string(tokens.size()), i + 1);
        }
        for (auto token : tokens) {
            if (!is_printed_decimal(token)) {
                throw DataError("not a two-decimal value: '" + std::string(token) + "'", i + 1);
            }
            cells.emplace_back(token);
        }
    }
    return PublishedFixture(z, std::move(cells));
}

std::string_view embedded_fixture_text(int z) {
    if (z < 1 || z > kFixtureCount) {
        throw DomainError("fixtures exist only for z = 1..9");
    }
    return detail::kFixtureText[z - 1];
}

PublishedFixture embedded_fixture(Confirmations z) {
    return parse_fixture(embedded_fixture_text(z.value()), z);
}

std::uint64_t fixture_checksum() {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (int z = 1; z <= kFixtureCount; ++z) {
        for (unsigned char byte : embedded_fixture_text(z)) {
            hash ^= byte;
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

ComparisonReport compare_fixture(const TableGrid& grid, const PublishedFixture& fixture,
                                 double tolerance_percent) {
    if (!(grid.z() == fixture.z())) {
        throw StructuralError("grid and fixture are for different z");
    }
    if (!same_axis(grid.r_axis(), default_r_axis()) ||
        !same_axis(grid.q_axis(), default_q_axis())) {
        throw StructuralError("fixtures compare only on the default 35 x 13 grid");
    }
    ComparisonReport report{grid.z(), 0, {}, 0.0};
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            const std::string& printed = fixture.at(i, j);
            const double computed = grid.at(i, j);
            const double delta = std::abs(computed - *detail::parse_number<double>(printed));
            report.max_abs_delta = std::max(report.max_abs_delta, delta);
            ++report.cells_compared;
            if (delta > tolerance_percent) {
                report.mismatches.push_back(
                    {grid.r_axis()[i], grid.q_axis()[j], computed, printed, delta});
            }
        }
    }
    return report;
}

std::string emit(const TableGrid& grid, Format format) {
    std::string out;
    switch (format) {
        case Format::csv: {
            out += "r\\q";
            for (double q : grid.q_axis()) {
                out += ',' + format_axis(q);
            }
            out += '\n';
            for (std::size_t i = 0; i < grid.rows(); ++i) {
                out += format_axis(grid.r_axis()[i]);
                for (std::size_t j = 0; j < grid.cols(); ++j) {
                    out += ',' + format_cell(grid.at(i, j));
                }
                out += '\n';
            }
            break;
        }
        case Format::markdown: {
            out += "| r\\q |";
            for (double q : grid.q_axis()) {
                out += ' ' + format_axis(q) + " |";
            }
            out += "\n|---|";
            for (std::size_t j = 0; j < grid.cols(); ++j) {
                out += "---:|";
            }
            out += '\n';
            for (std::size_t i = 0; i < grid.rows(); ++i) {
                out += "| " + format_axis(grid.r_axis()[i]) + " |";
                for (std::size_t j = 0; j < grid.cols(); ++j) {
                    out += ' ' + format_cell(grid.at(i, j)) + " |";
                }
                out += '\n';
            }
            break;
        }
        case Format::latex: {
            out += "\\begin{array}{|c||";
            for (std::size_t j = 0; j < grid.cols(); ++j) {
                out += "c|";
            }
            out += "}\n\\hline\nr \\backslash q";
            for (double q : grid.q_axis()) {
                out += " & " + format_axis(q);
            }
            out += "\\\\ \\hline \\hline\n";
            for (std::size_t i = 0; i < grid.rows(); ++i) {
                out += format_axis(grid.r_axis()[i]);
                for (std::size_t j = 0; j < grid.cols(); ++j) {
                    out += " & " + format_cell(grid.at(i, j));
                }
                out += i + 1 < grid.rows() ? "\\\\ \\hline\n" : "\\\\ \n\\hline\n";
            }
            out += "\\end{array}\n";
            break;
        }
    }
    return out;
}

TableGrid parse_csv(std::string_view text, Confirmations z) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) {
        throw DataError("empty table");
    }
    const auto header = detail::split(lines[0], ',');
    if (header.size() < 2 || header[0] != "r\\q") {
        throw DataError("missing 'r\\q' header", 1);
    }
    std::vector<double> q_axis;
    for (std::size_t j = 1; j < header.size(); ++j) {
        const auto q = detail::parse_number<double>(header[j]);
        if (!q) throw DataError("bad q value '" + std::string(header[j]) + "'", 1);
        q_axis.push_back(*q);
    }
    std::vector<double> r_axis;
    std::vector<double> cells;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::split(lines[i], ',');
        if (fields.size() != header.size()) {
            throw DataError("expected " + std::to_string(header.size()) + " fields", i + 1);
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto value = detail::parse_number<double>(fields[j]);
            if (!value) throw DataError("bad number '" + std::string(fields[j]) + "'", i + 1);
            (j == 0 ? r_axis : cells).push_back(*value);
        }
    }
    return TableGrid(z, std::move(r_axis), std::move(q_axis), std::move(cells));
}

}  // namespace dsrisk::tables
