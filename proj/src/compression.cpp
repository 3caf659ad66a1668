#include "ihrl/compression.hpp"

#include <string>

#include "ihrl/errors.hpp"

namespace ihrl {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

CompressionSpec default_compression(LayoutId layout) {
  CompressionSpec spec;
  if (layout == LayoutId::kHazard) {
    spec.cell_width = 5;
    spec.cell_height = 5;
  }
  return spec;
}

Compression::Compression(CompressionSpec spec, int width, int height)
    : spec_(spec), width_(width), height_(height) {
  if (spec.cell_width < 1 || spec.cell_height < 1)
    throw ConfigError("compression cell size must be at least 1x1");
  if (spec.origin_x < 0 || spec.origin_x >= spec.cell_width || spec.origin_y < 0 ||
      spec.origin_y >= spec.cell_height)
    throw ConfigError("compression origin offset must lie in [0, cell size)");
  if (width < 1 || height < 1) throw ConfigError("compression over an empty grid");
  // With a nonzero offset the cells left of / above the origin form an extra
  // leading column / row.
  columns_ = ceil_div(width - spec.origin_x, spec.cell_width) + (spec.origin_x > 0 ? 1 : 0);
  rows_ = ceil_div(height - spec.origin_y, spec.cell_height) + (spec.origin_y > 0 ? 1 : 0);
}

RegionId Compression::operator()(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_)
    throw UsageError("position (" + std::to_string(x) + "," + std::to_string(y) +
                     ") outside the compressed grid");
  const int shifted_x = x - spec_.origin_x + (spec_.origin_x > 0 ? spec_.cell_width : 0);
  const int shifted_y = y - spec_.origin_y + (spec_.origin_y > 0 ? spec_.cell_height : 0);
  const int col = shifted_x / spec_.cell_width;
  const int row = shifted_y / spec_.cell_height;
  return col + columns_ * row;
}

}  // namespace ihrl
