#pragma once

#include <string>
#include <vector>

#include "kir/points.hpp"

namespace kir {

// CSV conventions: header row required, UTF-8, comma delimiter, '.'
// decimal separator. Column selectors are header names or 0-based
// indices. For y_kind "so3" exactly 9 y columns are read as a row-major
// 3x3 rotation per row.
//
// With standardize set, each real column is shifted and scaled to mean 0
// and variance 1 (population 1/n convention); a zero-variance column is a
// ConstantColumn error. A row with an empty selected cell is a
// MissingValue error; a non-numeric cell is a ParseError naming the cell.
SampleSet load_csv(const std::string& path, const std::vector<std::string>& x_cols,
                   const std::vector<std::string>& y_cols, const std::string& y_kind,
                   bool standardize);

// Writes x/y columns with round-trip precision; rotations expand to 9
// columns. Inverse of load_csv for y_kind "real"/"so3" without
// standardization.
void save_csv(const std::string& path, const SampleSet& sample);

}  // namespace kir
