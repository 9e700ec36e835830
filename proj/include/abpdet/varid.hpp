#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "abpdet/field.hpp"

namespace abpdet {

// Identifies a variable. Matrix variables y^{row,col} have 1 <= row,col <= m;
// generic (non-matrix) variables use row = 0 and col = flat index.
struct VarId {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  friend auto operator<=>(const VarId&, const VarId&) = default;
};

inline VarId matrix_var(int row, int col) {
  if (row < 1 || col < 1) throw Error("matrix variable indices must be >= 1");
  return VarId{(std::uint32_t)row, (std::uint32_t)col};
}

inline VarId generic_var(int index) {
  if (index < 1) throw Error("generic variable index must be >= 1");
  return VarId{0, (std::uint32_t)index};
}

inline std::string to_string(VarId v) {
  if (v.row == 0) return "z_" + std::to_string(v.col);
  return "y^{" + std::to_string(v.row) + "," + std::to_string(v.col) + "}";
}

}  // namespace abpdet
