#pragma once

#include "ihrl/env.hpp"

namespace ihrl {

using RegionId = int;
inline constexpr RegionId kNoRegion = -1;

/// Grid overlay on agent position. Origin offsets shift the overlay phase and
/// must lie in [0, cell size).
struct CompressionSpec {
  int cell_width = 4;
  int cell_height = 4;
  int origin_x = 0;
  int origin_y = 0;

  bool operator==(const CompressionSpec&) const = default;
};

CompressionSpec default_compression(LayoutId layout);

/// Oracle map f from invariant states (positions) to region ids.
class Compression {
 public:
  Compression(CompressionSpec spec, int width, int height);

  RegionId operator()(int x, int y) const;
  RegionId operator()(const GridState& s) const { return (*this)(s.x, s.y); }
  RegionId operator()(Cell c) const { return (*this)(c.x, c.y); }

  const CompressionSpec& spec() const { return spec_; }
  int columns() const { return columns_; }
  int rows() const { return rows_; }
  int width() const { return width_; }
  int height() const { return height_; }
  /// Grid coordinates (column, row) of a region id.
  Cell region_coords(RegionId z) const { return {z % columns_, z / columns_}; }

 private:
  CompressionSpec spec_;
  int width_;
  int height_;
  int columns_;
  int rows_;
};

}  // namespace ihrl
