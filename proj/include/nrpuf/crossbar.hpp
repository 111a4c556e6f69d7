#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nrpuf/device.hpp"
#include "nrpuf/errors.hpp"
#include "nrpuf/random.hpp"

namespace nrpuf {

inline constexpr std::size_t kMaxColumnsSelected = 5;

/// Immutable M x N grid of cells, row-major.
class CrossbarArray {
 public:
  CrossbarArray() = default;

  CrossbarArray(std::size_t rows, std::size_t cols, std::vector<ReRAMCell> cells)
      : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows_ == 0 || cols_ == 0) throw ConfigError("crossbar dimensions must be >= 1");
    if (cells_.size() != rows_ * cols_) throw ConfigError("crossbar cell count mismatch");
    for (const auto& c : cells_)
      if (!(c.base_resistance > 0)) throw ConfigError("cell resistance must be > 0");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return cells_.size(); }

  const ReRAMCell& at(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_)
      throw RuntimeError("cell index (" + std::to_string(row) + "," + std::to_string(col) +
                         ") out of range");
    return cells_[row * cols_ + col];
  }
  const ReRAMCell& operator()(std::size_t row, std::size_t col) const noexcept {
    return cells_[row * cols_ + col];
  }
  std::span<const ReRAMCell> cells() const noexcept { return cells_; }

  std::size_t stuck_on_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const auto& c) {
      return c.state == CellState::stuck_on;
    }));
  }

  friend bool operator==(const CrossbarArray&, const CrossbarArray&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ReRAMCell> cells_;
};

/// Columns driven at READ voltage plus the ordered pair of rows whose
/// currents are compared (row_p feeds I_P, row_q feeds I_Q).
struct Selection {
  std::vector<std::size_t> columns;
  std::size_t row_p = 0;
  std::size_t row_q = 1;

  void validate(std::size_t rows, std::size_t cols) const {
    if (columns.empty() || columns.size() > kMaxColumnsSelected)
      throw ConfigError("selection must have 1..5 columns");
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] >= cols) throw RuntimeError("selected column out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (columns[i] == columns[j]) throw ConfigError("selected columns must be distinct");
    }
    if (row_p >= rows || row_q >= rows) throw RuntimeError("selected row out of range");
    if (row_p == row_q) throw ConfigError("selected rows must be distinct");
  }

  friend bool operator==(const Selection&, const Selection&) = default;
};

struct SumStats {
  double mean = 0;
  double variance = 0;

  friend bool operator==(const SumStats&, const SumStats&) = default;
};

inline CrossbarArray build_array(std::size_t rows, std::size_t cols, const DeviceParams& params,
                                 Stream& rng) {
  if (rows == 0 || cols == 0) throw ConfigError("crossbar dimensions must be >= 1");
  params.validate();
  std::vector<ReRAMCell> cells;
  cells.reserve(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) cells.push_back(sample_cell(params, rng));
  return CrossbarArray(rows, cols, std::move(cells));
}

/// Sum of the currents of the selected cells on one row. Each cell draws
/// its own supply/temperature realisation from rng.
inline double row_current(const CrossbarArray& array, const DeviceParams& params, std::size_t row,
                          std::span<const std::size_t> columns, const Environment& env,
                          Stream& rng) {
  double sum = 0;
  for (std::size_t col : columns) sum += cell_current(array.at(row, col), params, env, rng);
  return sum;
}

/// Row current at a realised read: per-column line voltages and one
/// temperature. column_voltage[k] drives columns[k].
inline double row_current_at(const CrossbarArray& array, const DeviceParams& params,
                             std::size_t row, std::span<const std::size_t> columns,
                             std::span<const double> column_voltage, double temperature) {
  double sum = 0;
  for (std::size_t k = 0; k < columns.size(); ++k)
    sum += cell_current_at(array(row, columns[k]), params, column_voltage[k], temperature);
  return sum;
}

/// Moments of a sum of independent terms.
inline SumStats combine_stats(std::span<const SumStats> stats) {
  if (stats.empty()) throw ConfigError("combine_stats needs at least one term");
  SumStats out;
  for (const auto& s : stats) {
    if (!(s.variance >= 0)) throw ConfigError("variance must be >= 0");
    out.mean += s.mean;
    out.variance += s.variance;
  }
  return out;
}

}  // namespace nrpuf
