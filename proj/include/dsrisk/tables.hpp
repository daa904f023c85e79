#ifndef DSRISK_TABLES_HPP
#define DSRISK_TABLES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsrisk/risk.hpp"

namespace dsrisk::tables {

/// r = 0.1, 0.2, ..., 3.5 (35 rows).
std::vector<double> default_r_axis();
/// q = 0.02, 0.04, ..., 0.26 (13 columns).
std::vector<double> default_q_axis();

/// Risk table for one z: cell (i, j) is the catch-up probability in percent
/// at r_axis[i], q_axis[j].
class TableGrid {
public:
    TableGrid(Confirmations z, std::vector<double> r_axis, std::vector<double> q_axis,
              std::vector<double> cells);

    Confirmations z() const noexcept { return z_; }
    const std::vector<double>& r_axis() const noexcept { return r_axis_; }
    const std::vector<double>& q_axis() const noexcept { return q_axis_; }
    std::size_t rows() const noexcept { return r_axis_.size(); }
    std::size_t cols() const noexcept { return q_axis_.size(); }
    double at(std::size_t row, std::size_t col) const { return cells_.at(row * cols() + col); }

private:
    Confirmations z_;
    std::vector<double> r_axis_;
    std::vector<double> q_axis_;
    std::vector<double> cells_;
};

TableGrid generate_table(Confirmations z, std::span<const double> q_axis,
                         std::span<const double> r_axis);
TableGrid generate_table(Confirmations z);

/// Two decimals, rounded half away from zero, trailing zeros and a trailing
/// point stripped: 11.996 -> "12", 3.40 -> "3.4", 0.004 -> "0".
std::string format_cell(double value_percent);

/// Shortest readable form of an axis value (0.1, 1, 3.5).
std::string format_axis(double value);

/// The printed table for one z, cells kept as their literal strings.
class PublishedFixture {
public:
    static constexpr std::size_t kRows = 35;
    static constexpr std::size_t kCols = 13;

    PublishedFixture(Confirmations z, std::vector<std::string> cells);

    Confirmations z() const noexcept { return z_; }
    const std::string& at(std::size_t row, std::size_t col) const {
        return cells_.at(row * kCols + col);
    }

private:
    Confirmations z_;
    std::vector<std::string> cells_;
};

/// Parse the fixture text format: 35 lines of 13 space-separated decimals,
/// rows r = 0.1 .. 3.5, columns q = 0.02 .. 0.26.
PublishedFixture parse_fixture(std::string_view text, Confirmations z);

inline constexpr int kFixtureCount = 9;

/// Raw bytes of the bundled fixture_z{N}.txt, N in 1..9.
std::string_view embedded_fixture_text(int z);
PublishedFixture embedded_fixture(Confirmations z);

/// 64-bit FNV-1a over the nine bundled fixture files, concatenated in z order.
std::uint64_t fixture_checksum();

struct Mismatch {
    double r;
    double q;
    double computed_percent;
    std::string published;
    double delta;
};

struct ComparisonReport {
    Confirmations z;
    std::size_t cells_compared;
    std::vector<Mismatch> mismatches;
    double max_abs_delta;

    bool ok() const noexcept { return mismatches.empty(); }
};

/// Half a printed unit, plus slack for the binary representation of the
/// printed decimal.
inline constexpr double kDefaultTolerancePercent = 0.005 + 1e-9;

/// Cell-by-cell comparison on the default grid. Throws StructuralError when
/// the grid is not on the default axes or z differs.
ComparisonReport compare_fixture(const TableGrid& grid, const PublishedFixture& fixture,
                                 double tolerance_percent = kDefaultTolerancePercent);

enum class Format { csv, markdown, latex };

std::string emit(const TableGrid& grid, Format format);

/// Inverse of emit(grid, Format::csv), up to cell formatting precision.
TableGrid parse_csv(std::string_view text, Confirmations z);

}  // namespace dsrisk::tables

#endif  // DSRISK_TABLES_HPP
