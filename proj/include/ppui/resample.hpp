#pragma once

// Class-balancing oversamplers. Both append rows after the untouched input
// and record where every appended row came from.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ppui/common.hpp"

namespace ppui {

struct ResamplePlan {
  struct Entry {
    Label label = 0;
    std::size_t original = 0;
    std::size_t target = 0;
  };
  std::vector<Entry> classes;  // ascending label
  std::uint64_t seed = 0;
};

/// Origin of an appended row. Indices refer to rows of the input matrix.
struct SyntheticOrigin {
  std::size_t seed_row = 0;
  /// Interpolation partner; equals seed_row for plain duplicates.
  std::size_t neighbor_row = 0;
  double lambda = 0.0;
};

struct Resampled {
  Matrix X;
  Labels y;
  /// One entry per appended row: origin[i] describes row (input rows + i).
  std::vector<SyntheticOrigin> origin;
  ResamplePlan plan;
  std::vector<std::string> notes;
};

/// Thrown by smote when a class that needs padding has a single row.
struct SmoteError : ConfigError {
  using ConfigError::ConfigError;
};

/// Pads every non-majority class with uniform with-replacement draws of its
/// own rows. Throws ConfigError for single-class input.
Resampled random_oversample(const Matrix& X, const Labels& y, std::uint64_t seed);

/// SMOTE with same-class neighbors; k is clamped per class to size - 1.
Resampled smote(const Matrix& X, const Labels& y, int k, std::uint64_t seed);

inline constexpr int kSmoteNeighbors = 5;

}  // namespace ppui
